import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    environmentOptions: {
      jsdom: { pretendToBeVisual: true },
    },
    // Acceptance tests spawn the real routing service; give the
    // scenario build and server startup room to finish.
    testTimeout: 30_000,
    hookTimeout: 120_000,
  },
});
