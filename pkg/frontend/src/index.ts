#!/usr/bin/env node
/**
 * Operator console. Connects to a running session service, opens a
 * session, redraws the live view on every wire event, and closes the
 * session from a rating prompt:
 *
 *   attentiv-dashboard --host 127.0.0.1 --port 7128 \
 *       --subject s01 --material video-3 --model default
 *
 * While live, type `close <self> [observer,observer,...] [trim]` to
 * submit ratings and end the session, for example `close 3 2,4 trim`.
 */

import * as readline from "node:readline";

import { DashboardClient } from "./client";
import { renderFrame } from "./render";

function argValue(flag: string, fallback: string): string {
  const index = process.argv.indexOf(`--${flag}`);
  if (index >= 0 && index + 1 < process.argv.length) {
    return process.argv[index + 1]!;
  }
  return fallback;
}

function main(): void {
  const client = new DashboardClient({
    host: argValue("host", "127.0.0.1"),
    port: Number(argValue("port", process.env.ATTENTIV_PORT ?? "7128")),
    subjectId: argValue("subject", "operator"),
    materialId: argValue("material", "session"),
    modelId: argValue("model", "default"),
    acclimationS: Number(argValue("acclimation", "120")),
    onChange: (view) => {
      process.stdout.write("\x1b[2J\x1b[H" + renderFrame(view) + "\n");
      if (view.phase === "closed" && view.summary) {
        process.exit(0);
      }
    },
  });
  client.connect();

  const prompt = readline.createInterface({ input: process.stdin });
  prompt.on("line", (line) => {
    const parts = line.trim().split(/\s+/);
    if (parts[0] !== "close" || parts.length < 2) {
      process.stderr.write(
        "commands: close <self 1..10> [obs,obs,...] [trim]\n",
      );
      return;
    }
    const self = Number(parts[1]);
    const trim = parts.includes("trim");
    const observers = (parts[2] ?? "")
      .split(",")
      .filter((s) => s.length > 0 && s !== "trim")
      .map(Number);
    const verdict = client.submitRatings(self, observers, trim);
    if (!verdict.ok) {
      process.stderr.write(`invalid ${verdict.field}: ${verdict.message}\n`);
    }
  });

  process.on("SIGINT", () => {
    client.stop();
    process.exit(130);
  });
}

main();
