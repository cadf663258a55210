import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T = any>(name: string): T {
    const raw = readFileSync(join(here, "..", "fixtures", name), "utf-8");
    return JSON.parse(raw) as T;
}
