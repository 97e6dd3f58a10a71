// HUD derivation. The client never computes game values: everything shown
// comes from server frames, and a field the server withheld stays hidden
// (level 1 frames carry neither score nor threshold, so the HUD can't
// leak them even by accident).

import type { LevelSpec, StateFrame } from "./protocol.js";

export interface HudModel {
  score: number | null;
  threshold: number | null;
  currentBpm: number | null;
  targetProgress: number | null; // 0..1, only when the level has a target
  multiplierActive: boolean;
}

export function hudFromState(
  frame: StateFrame,
  level: LevelSpec,
  currentBpm: number | null,
): HudModel {
  const score = frame.score ?? null;
  const target = level.target_score ?? null;
  return {
    score,
    threshold: frame.threshold ?? null,
    currentBpm: level.hr_adaptive ? currentBpm : null,
    targetProgress:
      target !== null && score !== null ? Math.min(1, score / target) : null,
    multiplierActive: frame.multiplier !== 1.0,
  };
}

export function emptyHud(): HudModel {
  return { score: null, threshold: null, currentBpm: null, targetProgress: null, multiplierActive: false };
}
