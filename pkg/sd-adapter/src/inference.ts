/**
 * Inference driver: fill the instance-pool directory with generated images.
 *
 * The pool layout is the hard contract with the composition pipeline:
 * <root>/<class>/seed<k>_<i>.png. Generation is sequential per class,
 * resumable (existing files are skipped), and every write is atomic
 * (temp file + rename), so an interrupted run leaves a partial but valid
 * pool.
 *
 * The actual image source is an injectable callable. Real diffusion runs
 * plug in a generator backed by a GPU runtime; tests and dry setups use the
 * deterministic stub generator, so no GPU is ever required here.
 */

import { mkdir, rename, writeFile } from "node:fs/promises";
import { existsSync } from "node:fs";
import { join } from "node:path";

import { encodePng } from "./png.js";

export const INFERENCE_DEFAULTS = {
  promptTemplate: "birdview of <classname>",
  denoisingSteps: 50,
  guidanceScale: 7.5,
  seeds: Array.from({ length: 20 }, (_, k) => k),
  perClassTarget: 200,
};

export interface InferenceJob {
  classNames: string[];
  poolRoot: string;
  perClassTarget: number;
  denoisingSteps: number;
  guidanceScale: number;
  seeds: number[];
}

export function makeJob(
  classNames: string[],
  poolRoot: string,
  perClassTarget = INFERENCE_DEFAULTS.perClassTarget,
): InferenceJob {
  if (classNames.length === 0) {
    throw new Error("no classes to generate for");
  }
  if (perClassTarget < 1) {
    throw new Error(`perClassTarget must be >= 1, got ${perClassTarget}`);
  }
  return {
    classNames: [...classNames].sort(),
    poolRoot,
    perClassTarget,
    denoisingSteps: INFERENCE_DEFAULTS.denoisingSteps,
    guidanceScale: INFERENCE_DEFAULTS.guidanceScale,
    seeds: [...INFERENCE_DEFAULTS.seeds],
  };
}

export function promptFor(className: string): string {
  return `birdview of ${className}`;
}

/** Produces PNG bytes for one sample of a prompt. */
export type Generator = (
  prompt: string,
  seed: number,
  sampleIndex: number,
) => Promise<Uint8Array>;

/**
 * Placeholder for a real diffusion backend; always throws with guidance.
 * Wiring an actual runtime means passing your own Generator to runInference.
 */
export const unavailableGenerator: Generator = async () => {
  throw new Error(
    "no diffusion runtime is wired in: pass a Generator to runInference, " +
      "or use the stub generator (--stub on the CLI) for placeholder images",
  );
};

/** Deterministic placeholder images: class-and-seed-hashed flat color. */
export const stubGenerator: Generator = async (prompt, seed, sampleIndex) => {
  let hash = 2166136261;
  for (const ch of `${prompt}:${seed}:${sampleIndex}`) {
    hash = (hash ^ ch.charCodeAt(0)) >>> 0;
    hash = Math.imul(hash, 16777619) >>> 0;
  }
  const width = 16 + (hash % 48);
  const height = 16 + ((hash >>> 8) % 48);
  const rgb = new Uint8Array(width * height * 3);
  for (let i = 0; i < rgb.length; i += 3) {
    rgb[i] = hash & 0xff;
    rgb[i + 1] = (hash >>> 8) & 0xff;
    rgb[i + 2] = (hash >>> 16) & 0xff;
  }
  return encodePng(width, height, rgb);
};

export interface InferenceResult {
  generated: number;
  skipped: number;
  perClass: Record<string, number>;
}

/**
 * Write pool files until every class reaches its target count.
 *
 * Sample j of a class maps to seed j % 20, sample index floor(j / 20),
 * matching how a seeded batch generator spreads its output.
 */
export async function runInference(job: InferenceJob, generate: Generator): Promise<InferenceResult> {
  let generated = 0;
  let skipped = 0;
  const perClass: Record<string, number> = {};
  for (const className of job.classNames) {
    const classDir = join(job.poolRoot, className);
    await mkdir(classDir, { recursive: true });
    const prompt = promptFor(className);
    for (let j = 0; j < job.perClassTarget; j++) {
      const seed = job.seeds[j % job.seeds.length]!;
      const sampleIndex = Math.floor(j / job.seeds.length);
      const target = join(classDir, `seed${seed}_${sampleIndex}.png`);
      if (existsSync(target)) {
        skipped += 1;
        continue;
      }
      const bytes = await generate(prompt, seed, sampleIndex);
      const temp = `${target}.tmp-${process.pid}`;
      await writeFile(temp, bytes);
      await rename(temp, target);
      generated += 1;
    }
    perClass[className] = job.perClassTarget;
  }
  return { generated, skipped, perClass };
}
