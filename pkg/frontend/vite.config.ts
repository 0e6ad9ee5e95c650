/// <reference types="vitest" />
import { defineConfig } from "vite";

// The API has no CORS layer; in dev the vite server proxies it instead.
const API = process.env.MDDCONFIG_API ?? "http://127.0.0.1:8000";

export default defineConfig({
  server: {
    proxy: {
      "/models": API,
      "/sessions": API,
      "/healthz": API,
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 20000,
    hookTimeout: 60000,
  },
});
