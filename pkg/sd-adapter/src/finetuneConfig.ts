/**
 * LoRA finetune configuration emission.
 *
 * The emitted JSON embeds the fixed training hyperparameters together with
 * the resolved (image, prompt) pairs from the manifest. Emission is
 * deterministic: same manifest in, identical bytes out.
 */

import { writeFile } from "node:fs/promises";
import { existsSync } from "node:fs";

import { readManifest, type ManifestEntry } from "./manifest.js";

export const FINETUNE_DEFAULTS = {
  baseModel: "runwayml/stable-diffusion-v1-5",
  batchSize: 1,
  learningRate: 3e-4,
  totalIterations: 100_000,
  frozenModules: ["vae", "clip_text_encoder"] as const,
};

export interface FinetuneConfig {
  base_model: string;
  batch_size: number;
  learning_rate: number;
  total_iterations: number;
  frozen_modules: string[];
  manifest_path: string;
  output_adapter_path: string;
  pairs: { image: string; prompt: string }[];
}

export function buildFinetuneConfig(
  entries: ManifestEntry[],
  manifestPath: string,
  outputAdapterPath: string,
): FinetuneConfig {
  if (entries.length === 0) {
    throw new Error("manifest is empty: nothing to finetune on");
  }
  const missing = entries.filter((e) => !existsSync(e.path)).map((e) => e.path);
  if (missing.length > 0) {
    throw new Error(`missing crop files:\n${missing.join("\n")}`);
  }
  return {
    base_model: FINETUNE_DEFAULTS.baseModel,
    batch_size: FINETUNE_DEFAULTS.batchSize,
    learning_rate: FINETUNE_DEFAULTS.learningRate,
    total_iterations: FINETUNE_DEFAULTS.totalIterations,
    frozen_modules: [...FINETUNE_DEFAULTS.frozenModules],
    manifest_path: manifestPath,
    output_adapter_path: outputAdapterPath,
    pairs: entries.map((e) => ({ image: e.path, prompt: e.prompt })),
  };
}

export async function emitFinetuneConfig(
  manifestPath: string,
  outPath: string,
  outputAdapterPath = "lora_adapter.safetensors",
): Promise<FinetuneConfig> {
  const entries = await readManifest(manifestPath);
  const config = buildFinetuneConfig(entries, manifestPath, outputAdapterPath);
  await writeFile(outPath, JSON.stringify(config, null, 2) + "\n", "utf-8");
  return config;
}
