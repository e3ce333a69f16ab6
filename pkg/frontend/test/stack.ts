/** Boots the primary stack (`mention-notify serve`) for console tests. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import readline from "node:readline";

// vitest runs with cwd = frontend/, one level below the repository root
const REPO_ROOT = path.resolve(process.cwd(), "..");

export interface StackUrls {
  dashboard: string;
  aggregator: string;
  repository: string;
  archive: string;
}

export interface Stack {
  urls: StackUrls;
  stop(): Promise<void>;
}

export async function startStack(overrides: string[] = []): Promise<Stack> {
  const runDir = mkdtempSync(path.join(tmpdir(), "console-run-"));
  const args = [
    "-m",
    "mention_notify.cli",
    "serve",
    "--config",
    path.join(REPO_ROOT, "demo.config"),
    "--set",
    `run_dir=${runDir}`,
    "--set",
    "policy.auto_send=false",
    ...overrides.flatMap((item) => ["--set", item]),
  ];
  const child: ChildProcess = spawn(process.env.PYTHON ?? "python3", args, {
    cwd: REPO_ROOT,
    stdio: ["ignore", "pipe", "inherit"],
  });
  const lines = readline.createInterface({ input: child.stdout! });
  const first = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("stack did not boot in time")), 30_000);
    lines.once("line", (line) => {
      clearTimeout(timer);
      resolve(line);
    });
    child.once("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`serve exited early with code ${code}`));
    });
  });
  const urls = JSON.parse(first) as StackUrls;
  return {
    urls,
    stop: () =>
      new Promise<void>((resolve) => {
        const force = setTimeout(() => {
          child.kill("SIGKILL");
          resolve();
        }, 5_000);
        child.once("exit", () => {
          clearTimeout(force);
          resolve();
        });
        child.kill("SIGINT");
      }),
  };
}

export async function until(
  check: () => boolean,
  timeoutMs = 10_000,
  message = "condition not met in time",
): Promise<void> {
  const started = Date.now();
  while (!check()) {
    if (Date.now() - started > timeoutMs) {
      throw new Error(message);
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}
