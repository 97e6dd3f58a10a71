import { describe, expect, it } from "vitest";

import {
  decodeServerFrame,
  encodeClientFrame,
  levelSpec,
} from "../src/protocol.js";

describe("levelSpec", () => {
  it("level 1 hides score and adaptation", () => {
    expect(levelSpec(1)).toEqual({
      level_id: 1, show_score: false, hr_adaptive: false, target_score: null,
    });
  });

  it("level 2 shows both, no target", () => {
    expect(levelSpec(2)).toEqual({
      level_id: 2, show_score: true, hr_adaptive: true, target_score: null,
    });
  });

  it("level 3 defaults to target 30", () => {
    expect(levelSpec(3).target_score).toBe(30);
    expect(levelSpec(3, 6).target_score).toBe(6);
  });
});

describe("encodeClientFrame", () => {
  it("stamps version and sequence", () => {
    const raw = encodeClientFrame({ type: "hr", session_id: "s", bpm: 71.5, ts: 1000 }, 7);
    expect(JSON.parse(raw)).toEqual({
      v: 1, seq: 7, type: "hr", session_id: "s", bpm: 71.5, ts: 1000,
    });
    expect(raw).not.toContain("\n");
  });
});

describe("decodeServerFrame", () => {
  it("round-trips a state frame", () => {
    const frame = {
      v: 1, type: "state", seq: 3, session_id: "s", tick: 12,
      bird_x: 120, bird_y: 320, bird_vy: -4, multiplier: 0.7, phase: "running",
      pillars: [{ index: 0, x: 400, gap_center_y: 300, gap_height: 160, nominal_speed: 80 }],
      score: 2, threshold: 79,
    };
    expect(decodeServerFrame(JSON.stringify(frame))).toEqual(frame);
  });

  it("rejects unknown protocol versions", () => {
    expect(() => decodeServerFrame(JSON.stringify({ v: 2, type: "state", seq: 1 })))
      .toThrow(/version/);
  });
});
