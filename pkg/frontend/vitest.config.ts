import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    testTimeout: 120_000,
    hookTimeout: 120_000,
    // the e2e suite spawns one python stack per file; keep files sequential
    fileParallelism: false,
  },
});
