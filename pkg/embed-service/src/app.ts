/**
 * HTTP surface of the embedding service.
 *
 * GET  /health -> { model, dim, status } (503 while the provider loads)
 * POST /embed  -> { model, dim, vectors, truncated } for { texts: [...] }
 *
 * Requests are validated with zod; a batch larger than maxBatch is a
 * 400, an over-long text is truncated to maxChars and flagged in the
 * response.
 */

import express, { type Express, type NextFunction, type Request, type Response } from 'express';
import { z } from 'zod';

import type { EmbeddingProvider } from './providers.js';

export interface AppLimits {
  maxBatch: number;
  maxChars: number;
}

export const DEFAULT_LIMITS: AppLimits = { maxBatch: 128, maxChars: 10000 };

const embedRequestSchema = z.object({
  texts: z
    .array(z.string(), { error: 'texts must be an array of strings' })
    .min(1, { error: 'texts must not be empty' }),
});

export function createApp(
  providerPromise: Promise<EmbeddingProvider>,
  limits: AppLimits = DEFAULT_LIMITS,
): Express {
  const app = express();
  app.use(express.json({ limit: '5mb' }));

  let provider: EmbeddingProvider | null = null;
  let loadError: Error | null = null;
  providerPromise.then(
    (loaded) => {
      provider = loaded;
    },
    (error: Error) => {
      loadError = error;
    },
  );

  app.get('/health', (_req: Request, res: Response) => {
    if (loadError) {
      res.status(503).json({ status: 'error', error: loadError.message });
      return;
    }
    if (!provider) {
      res.status(503).json({ status: 'loading' });
      return;
    }
    res.json({ model: provider.name, dim: provider.dim, status: 'ready' });
  });

  app.post('/embed', (req: Request, res: Response, next: NextFunction) => {
    if (!provider) {
      res
        .status(503)
        .json({ error: loadError ? loadError.message : 'model is still loading' });
      return;
    }
    const parsed = embedRequestSchema.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: parsed.error.issues[0]?.message ?? 'invalid request' });
      return;
    }
    const { texts } = parsed.data;
    if (texts.length > limits.maxBatch) {
      res
        .status(400)
        .json({ error: `batch of ${texts.length} exceeds the limit of ${limits.maxBatch}` });
      return;
    }
    let truncated = false;
    const bounded = texts.map((text) => {
      if (text.length > limits.maxChars) {
        truncated = true;
        return text.slice(0, limits.maxChars);
      }
      return text;
    });
    const ready = provider;
    ready
      .embed(bounded)
      .then((vectors) => {
        res.json({ model: ready.name, dim: ready.dim, vectors, truncated });
      })
      .catch(next);
  });

  // bad JSON from the body parser surfaces as a SyntaxError with a status
  app.use((error: Error, _req: Request, res: Response, next: NextFunction) => {
    if (res.headersSent) {
      next(error);
      return;
    }
    const status = (error as { status?: number }).status;
    if (status && status >= 400 && status < 500) {
      res.status(400).json({ error: 'malformed request body' });
      return;
    }
    res.status(500).json({ error: error.message || 'internal error' });
  });

  return app;
}
