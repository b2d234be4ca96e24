/** Spawn the python arena stack and hand back its connection details. */

import { spawn, type ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";
import path from "node:path";
import readline from "node:readline";

export interface StackInfo {
  base_url: string;
  evaluator_id: string;
  policy_ids: string[];
  display_names: string[];
  timeout_s: number;
}

export class ArenaStack {
  private constructor(
    public readonly info: StackInfo,
    private readonly child: ChildProcess,
  ) {}

  static async start(): Promise<ArenaStack> {
    const script = path.join(path.dirname(fileURLToPath(import.meta.url)), "stack.py");
    const child = spawn("python3", [script], { stdio: ["ignore", "pipe", "inherit"] });
    const rl = readline.createInterface({ input: child.stdout! });
    const info = await new Promise<StackInfo>((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("arena stack did not start")), 60_000);
      rl.once("line", (line) => {
        clearTimeout(timer);
        resolve(JSON.parse(line) as StackInfo);
      });
      child.once("exit", (code) => {
        clearTimeout(timer);
        reject(new Error(`arena stack exited early with code ${code}`));
      });
    });
    return new ArenaStack(info, child);
  }

  stop(): void {
    this.child.kill("SIGTERM");
  }
}
