// End-to-end through the real relay: spawns the Python server, then
// plays entirely through the client code (SessionClient + samplers +
// HUD model) over real websockets.
//
// Covers the full acceptance path: a scripted player completes a
// level-3 session, the manual slider pushed above threshold visibly
// slows the pillars, level-1 HUD exposes neither score nor threshold,
// and a submitted affect questionnaire lands in the session store.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionClient, type WsLike } from "../src/client.js";
import { hudFromState } from "../src/hud.js";
import { ManualSlider } from "../src/hrSource.js";
import { levelSpec, type StateFrame } from "../src/protocol.js";
import { validatePanas } from "../src/validation.js";

const PORT = 18000 + Math.floor(Math.random() * 2000);
const URL = `ws://127.0.0.1:${PORT}`;
const makeSocket = (url: string) => new WebSocket(url) as unknown as WsLike;

let relay: ChildProcess;
let logDir: string;

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`http://127.0.0.1:${PORT}/health`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("relay did not come up");
}

beforeAll(async () => {
  logDir = mkdtempSync(join(tmpdir(), "pulsebird-e2e-"));
  relay = spawn(
    "python3",
    ["-m", "pulsebird.cli", "serve", "--port", String(PORT), "--log-dir", logDir],
    { stdio: "ignore" },
  );
  await waitForHealth();
}, 30_000);

afterAll(() => {
  relay?.kill();
});

// speeds the level-3 run up to a few seconds without changing mechanics
const FAST_CONFIG = {
  pillar_spacing: 160.0,
  initial_pillar_speed: 120.0,
  speed_cap: 300.0,
};

/** Effective pillar speeds (units/s) measured between two frames. */
function measuredSpeedRatio(a: StateFrame, b: StateFrame, tickRate: number): number | null {
  const dt = (b.tick - a.tick) / tickRate;
  if (dt <= 0) return null;
  for (const pa of a.pillars) {
    const pb = b.pillars.find((p) => p.index === pa.index);
    if (pb) {
      const speed = (pa.x - pb.x) / dt;
      return speed / pa.nominal_speed;
    }
  }
  return null;
}

describe("level-3 session end to end", () => {
  it(
    "plays to the target, slows under the slider, records the questionnaire",
    async () => {
      const client = new SessionClient(URL, makeSocket);
      const slider = new ManualSlider(70);
      const multipliersSeen = new Set<number>();
      const speedRatios: { multiplier: number; ratio: number }[] = [];
      let prevFrame: StateFrame | null = null;
      let frames = 0;

      const info = await client.openSession(levelSpec(3, 6), {
        seed: 77,
        config: FAST_CONFIG,
      });
      expect(info.level.level_id).toBe(3);
      const epoch = Date.now();

      // resting baseline from the slider: five samples
      for (let i = 0; i < 5; i++) {
        const ack = await client.sendHr(slider.sample(i), i * 1000);
        expect(ack.status).toBe("ok");
      }

      const ended = new Promise<void>((resolve) => {
        client.onEnd = () => resolve();
      });

      let hrTick = 0;
      client.onState = (frame) => {
        frames += 1;
        multipliersSeen.add(frame.multiplier);
        if (prevFrame) {
          const ratio = measuredSpeedRatio(prevFrame, frame, info.config.tick_rate);
          if (ratio !== null) speedRatios.push({ multiplier: prevFrame.multiplier, ratio });
        }
        prevFrame = frame;

        // the scripted player: tap whenever the bird sits below the gap line
        const gap = frame.pillars
          .filter((p) => p.x + info.config.pillar_width >= frame.bird_x)
          .sort((a, b) => a.x - b.x)[0];
        const target = gap ? gap.gap_center_y : info.config.world_height / 2;
        if (frame.bird_y > target) client.tap().catch(() => {});

        // stress spike between scores 2 and 4, calm after
        const score = frame.score ?? 0;
        slider.set(score >= 2 && score < 4 ? 95 : 70);
        if (frames % 30 === 0) {
          hrTick += 1;
          client
            .sendHr(slider.sample((Date.now() - epoch) / 1000), 5000 + hrTick * 500)
            .catch(() => {});
        }
      };

      await client.tap(); // first input starts the loop
      await ended;

      expect(client.end!.reason).toBe("success");
      expect(client.end!.final_score).toBe(6);

      // the slider spike visibly slowed the pillars: reduced frames moved
      // at 0.7x nominal, normal frames at 1.0x
      expect(multipliersSeen).toContain(0.7);
      expect(multipliersSeen).toContain(1.0);
      const reduced = speedRatios.filter((s) => s.multiplier === 0.7).map((s) => s.ratio);
      const normal = speedRatios.filter((s) => s.multiplier === 1.0).map((s) => s.ratio);
      expect(reduced.length).toBeGreaterThan(3);
      const mean = (xs: number[]) => xs.reduce((a, b) => a + b, 0) / xs.length;
      expect(mean(reduced)).toBeCloseTo(0.7, 1);
      expect(mean(normal)).toBeCloseTo(1.0, 1);

      // HUD during a level-3 run carries score, threshold, progress
      const hud = hudFromState(prevFrame!, info.level, slider.value);
      expect(hud.score).toBe(6);
      expect(hud.threshold).toBe(75);
      expect(hud.targetProgress).toBe(1);

      // post-session questionnaire: validated locally, accepted by the
      // relay, persisted beside the session log
      const items = [5, 4, 5, 4, 5, 4, 5, 4, 5, 4, 1, 1, 2, 1, 1, 2, 1, 1, 2, 1];
      expect(validatePanas(items).ok).toBe(true);
      const ack = await client.submitQuestionnaire("panas", items);
      expect(ack.status).toBe("ok");

      const sidecar = join(logDir, `${info.sessionId}.questionnaires.jsonl`);
      const stored = JSON.parse(readFileSync(sidecar, "utf-8").trim());
      expect(stored.instrument).toBe("panas");
      expect(stored.items).toEqual(items);
      expect(stored.session_id).toBe(info.sessionId);

      // the session log itself is finalized in the store
      const log = readFileSync(join(logDir, `${info.sessionId}.jsonl`), "utf-8").trim();
      const lastLine = JSON.parse(log.split("\n").at(-1)!);
      expect(lastLine.kind).toBe("end");
      expect(lastLine.payload.final_score).toBe(6);

      client.close();
    },
    60_000,
  );

  it("rejects an invalid questionnaire client-side before any network", () => {
    expect(validatePanas(Array(19).fill(3)).ok).toBe(false);
    expect(validatePanas([...Array(19).fill(3), 9]).ok).toBe(false);
  });
});

describe("level-1 information hiding end to end", () => {
  it(
    "no frame ever carries score or threshold; the HUD shows neither",
    async () => {
      const client = new SessionClient(URL, makeSocket);
      const frames: StateFrame[] = [];
      const info = await client.openSession(levelSpec(1), {
        seed: 5,
        config: {
          gravity: 0.2,
          flap_impulse: 5.0,
          initial_gap: 600.0,
          gap_cap: 620.0,
          initial_pillar_speed: 40.0,
          speed_cap: 100.0,
          pushback_speed: 1.0,
        },
      });
      const enough = new Promise<void>((resolve) => {
        client.onState = (frame) => {
          frames.push(frame);
          if (frames.length >= 20) resolve();
        };
      });
      await client.tap();
      await enough;
      client.close();

      expect(frames.length).toBeGreaterThanOrEqual(20);
      for (const frame of frames) {
        expect(frame).not.toHaveProperty("score");
        expect(frame).not.toHaveProperty("threshold");
        const hud = hudFromState(frame, info.level, 72);
        expect(hud.score).toBeNull();
        expect(hud.threshold).toBeNull();
        expect(hud.currentBpm).toBeNull();
      }
    },
    30_000,
  );
});
