import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['tests/**/*.test.ts'],
    // The integration suite boots the real bench server as a subprocess.
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
