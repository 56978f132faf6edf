/**
 * Service entry point.
 *
 * Configuration via flags or environment:
 *   --port N      / PORT            listen port (default 8756)
 *   --model SPEC  / EMBED_MODEL     "hash:<dim>:<seed>" or a model name
 *                                   (default hash:64:42)
 *   --max-batch N / EMBED_MAX_BATCH texts per request (default 128)
 *   --max-chars N / EMBED_MAX_CHARS chars per text before truncation
 *                                   (default 10000)
 */

import { createApp, DEFAULT_LIMITS } from './app.js';
import { loadProvider } from './providers.js';

function argValue(name: string): string | undefined {
  const index = process.argv.indexOf(name);
  if (index >= 0 && index + 1 < process.argv.length) {
    return process.argv[index + 1];
  }
  return undefined;
}

function intSetting(flag: string, envName: string, fallback: number): number {
  const raw = argValue(flag) ?? process.env[envName];
  if (raw === undefined) {
    return fallback;
  }
  const value = Number(raw);
  if (!Number.isInteger(value) || value < 1) {
    console.error(`${flag}/${envName} must be a positive integer, got "${raw}"`);
    process.exit(2);
  }
  return value;
}

const port = intSetting('--port', 'PORT', 8756);
const model = argValue('--model') ?? process.env.EMBED_MODEL ?? 'hash:64:42';
const limits = {
  maxBatch: intSetting('--max-batch', 'EMBED_MAX_BATCH', DEFAULT_LIMITS.maxBatch),
  maxChars: intSetting('--max-chars', 'EMBED_MAX_CHARS', DEFAULT_LIMITS.maxChars),
};

const providerPromise = loadProvider(model);
providerPromise.then(
  (provider) => {
    console.log(`embed-service ready: model=${provider.name} dim=${provider.dim}`);
  },
  (error: Error) => {
    console.error(`embed-service failed to load model "${model}": ${error.message}`);
    process.exit(1);
  },
);

const app = createApp(providerPromise, limits);
const server = app.listen(port, () => {
  console.log(`embed-service listening on port ${port}`);
});

for (const signal of ['SIGINT', 'SIGTERM'] as const) {
  process.on(signal, () => {
    server.close(() => process.exit(0));
  });
}
