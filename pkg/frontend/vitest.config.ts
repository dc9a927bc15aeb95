import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // the round-trip test shells out to the Python consumer
    testTimeout: 30_000,
  },
});
