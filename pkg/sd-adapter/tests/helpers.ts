import { mkdtemp, mkdir, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";

import { encodePng } from "../src/png.js";

export async function makeTempDir(): Promise<string> {
  return mkdtemp(join(tmpdir(), "sd-adapter-test-"));
}

export interface CropSpec {
  cropId: string;
  className: string;
  relPath: string;
}

/** Write crop PNGs plus a manifest JSONL referencing them by relative path. */
export async function writeManifestFixture(root: string, crops: CropSpec[]): Promise<string> {
  const lines: string[] = [];
  for (const crop of crops) {
    const filePath = join(root, crop.relPath);
    await mkdir(dirname(filePath), { recursive: true });
    const rgb = new Uint8Array(8 * 8 * 3).fill(crop.className.length * 31);
    await writeFile(filePath, encodePng(8, 8, rgb));
    lines.push(
      JSON.stringify({
        crop_id: crop.cropId,
        path: crop.relPath,
        prompt: `birdview of ${crop.className}`,
        class: crop.className,
      }),
    );
  }
  const manifestPath = join(root, "manifest.jsonl");
  await writeFile(manifestPath, lines.map((l) => l + "\n").join(""), "utf-8");
  return manifestPath;
}

export function cropSet(className: string, count: number): CropSpec[] {
  return Array.from({ length: count }, (_, i) => ({
    cropId: `${className}_${String(i).padStart(4, "0")}`,
    className,
    relPath: `crops/${className}/${className}_${String(i).padStart(4, "0")}.png`,
  }));
}
