/**
 * Embedding providers.
 *
 * The hash provider is fully deterministic and needs no model files: a
 * client implementing the same procedure reproduces its vectors bit for
 * bit, which makes it the reference backend for contract checks. Any
 * other model name is loaded through @xenova/transformers, which is an
 * optional install.
 */

import { createHash } from 'node:crypto';

export interface EmbeddingProvider {
  readonly name: string;
  readonly dim: number;
  embed(texts: string[]): Promise<number[][]>;
}

const MASK64 = 0xffffffffffffffffn;
const GOLDEN_GAMMA = 0x9e3779b97f4a7c15n;
const MIX_1 = 0xbf58476d1ce4e5b9n;
const MIX_2 = 0x94d049bb133111ebn;
const TO_UNIT = 2 ** -53;

function splitmixNext(state: bigint): [bigint, bigint] {
  state = (state + GOLDEN_GAMMA) & MASK64;
  let z = state;
  z = ((z ^ (z >> 30n)) * MIX_1) & MASK64;
  z = ((z ^ (z >> 27n)) * MIX_2) & MASK64;
  z = z ^ (z >> 31n);
  return [state, z];
}

/**
 * Deterministic embedding of one text.
 *
 * Procedure: lowercase, split on whitespace; per token, seed a
 * SplitMix64 stream with the first 8 bytes (big-endian) of
 * SHA-256(utf8(token) || seed as 8 big-endian bytes); map each 64-bit
 * draw u to 2 * ((u >> 11) * 2^-53) - 1; sum token vectors in order.
 * Empty text gives the zero vector.
 */
export function hashEmbed(text: string, dim: number, seed: bigint): number[] {
  const seedBytes = Buffer.alloc(8);
  seedBytes.writeBigUInt64BE(seed & MASK64);
  const acc = new Array<number>(dim).fill(0);
  const tokens = text.toLowerCase().split(/\s+/).filter((t) => t.length > 0);
  for (const token of tokens) {
    const digest = createHash('sha256')
      .update(Buffer.concat([Buffer.from(token, 'utf-8'), seedBytes]))
      .digest();
    let state = digest.readBigUInt64BE(0);
    for (let i = 0; i < dim; i++) {
      let z: bigint;
      [state, z] = splitmixNext(state);
      acc[i] += Number(z >> 11n) * TO_UNIT * 2 - 1;
    }
  }
  return acc;
}

export function hashProvider(dim: number, seed: bigint): EmbeddingProvider {
  if (!Number.isInteger(dim) || dim < 1) {
    throw new Error(`hash provider dim must be a positive integer, got ${dim}`);
  }
  return {
    name: `hash:${dim}:${seed}`,
    dim,
    embed: async (texts) => texts.map((text) => hashEmbed(text, dim, seed)),
  };
}

/**
 * Sentence-embedding model via @xenova/transformers. The package is not
 * a declared dependency (model weights also need network access on
 * first use); install it explicitly to enable this provider.
 */
export async function transformersProvider(model: string): Promise<EmbeddingProvider> {
  // resolved at runtime only, so a missing optional install is a clean error
  const moduleName = '@xenova/transformers';
  let transformers: any;
  try {
    transformers = await import(moduleName);
  } catch {
    throw new Error(
      `model "${model}" needs @xenova/transformers; run: npm install @xenova/transformers`,
    );
  }
  const extractor = await transformers.pipeline('feature-extraction', model);
  const probe = await extractor('probe', { pooling: 'mean', normalize: true });
  const dim = probe.data.length;
  return {
    name: model,
    dim,
    embed: async (texts) => {
      const vectors: number[][] = [];
      for (const text of texts) {
        const output = await extractor(text, { pooling: 'mean', normalize: true });
        vectors.push(Array.from(output.data as Float32Array));
      }
      return vectors;
    },
  };
}

/** Parse "hash:<dim>:<seed>" or pass a model name to transformers. */
export async function loadProvider(spec: string): Promise<EmbeddingProvider> {
  if (spec.startsWith('hash:')) {
    const parts = spec.split(':');
    if (parts.length !== 3) {
      throw new Error(`bad hash provider spec "${spec}", expected hash:<dim>:<seed>`);
    }
    const dim = Number(parts[1]);
    let seed: bigint;
    try {
      seed = BigInt(parts[2]);
    } catch {
      throw new Error(`bad hash provider seed in "${spec}"`);
    }
    return hashProvider(dim, seed);
  }
  return transformersProvider(spec);
}
