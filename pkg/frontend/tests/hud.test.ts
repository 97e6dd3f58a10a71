import { describe, expect, it } from "vitest";

import { hudFromState } from "../src/hud.js";
import { levelSpec, type StateFrame } from "../src/protocol.js";

function stateFrame(extra: Partial<StateFrame> = {}): StateFrame {
  return {
    v: 1, type: "state", seq: 1, session_id: "s", tick: 10,
    bird_x: 120, bird_y: 320, bird_vy: 0, multiplier: 1.0, phase: "running",
    pillars: [],
    ...extra,
  };
}

describe("hudFromState", () => {
  it("level 1 shows neither score nor threshold, ever", () => {
    // a level-1 frame never carries the fields; the HUD stays dark even
    // if someone hands it a bpm reading
    const hud = hudFromState(stateFrame(), levelSpec(1), 72);
    expect(hud.score).toBeNull();
    expect(hud.threshold).toBeNull();
    expect(hud.currentBpm).toBeNull();
    expect(hud.targetProgress).toBeNull();
  });

  it("level 2 shows score, threshold and live bpm", () => {
    const hud = hudFromState(stateFrame({ score: 4, threshold: 79 }), levelSpec(2), 81);
    expect(hud).toEqual({
      score: 4, threshold: 79, currentBpm: 81, targetProgress: null, multiplierActive: false,
    });
  });

  it("level 3 adds target progress, capped at 1", () => {
    const hud = hudFromState(stateFrame({ score: 15, threshold: 79 }), levelSpec(3, 30), null);
    expect(hud.targetProgress).toBeCloseTo(0.5);
    const done = hudFromState(stateFrame({ score: 42, threshold: 79 }), levelSpec(3, 30), null);
    expect(done.targetProgress).toBe(1);
  });

  it("multiplier badge lights while slowed", () => {
    expect(hudFromState(stateFrame({ multiplier: 0.7 }), levelSpec(1), null).multiplierActive)
      .toBe(true);
    expect(hudFromState(stateFrame({ multiplier: 1.0 }), levelSpec(1), null).multiplierActive)
      .toBe(false);
  });
});
