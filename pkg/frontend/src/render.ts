// Canvas renderer. Pure presentation: draws exactly what the last state
// frame says, plus the HUD model. World coordinates map 1:1 onto the
// canvas (y grows downward in both).

import type { HudModel } from "./hud.js";
import type { GameConfigWire, SessionEndFrame, StateFrame } from "./protocol.js";

const SKY = "#e8f4fa";
const PILLAR = "#3f7d4e";
const PILLAR_EDGE = "#2c5737";
const BIRD = "#e2a33d";
const BIRD_SLOWED = "#e2603d";
const TEXT = "#1c2b33";

export function drawFrame(
  ctx: CanvasRenderingContext2D,
  config: GameConfigWire,
  frame: StateFrame,
  hud: HudModel,
): void {
  const w = config.world_width;
  const h = config.world_height;
  ctx.fillStyle = SKY;
  ctx.fillRect(0, 0, w, h);

  for (const pillar of frame.pillars) {
    const top = pillar.gap_center_y - pillar.gap_height / 2;
    const bottom = pillar.gap_center_y + pillar.gap_height / 2;
    ctx.fillStyle = PILLAR;
    ctx.fillRect(pillar.x, 0, config.pillar_width, top);
    ctx.fillRect(pillar.x, bottom, config.pillar_width, h - bottom);
    ctx.strokeStyle = PILLAR_EDGE;
    ctx.strokeRect(pillar.x, 0, config.pillar_width, top);
    ctx.strokeRect(pillar.x, bottom, config.pillar_width, h - bottom);
  }

  ctx.beginPath();
  ctx.arc(frame.bird_x, frame.bird_y, 9, 0, Math.PI * 2);
  ctx.fillStyle = hud.multiplierActive ? BIRD_SLOWED : BIRD;
  ctx.fill();
  ctx.strokeStyle = TEXT;
  ctx.stroke();

  drawHud(ctx, config, hud);
}

function drawHud(ctx: CanvasRenderingContext2D, config: GameConfigWire, hud: HudModel): void {
  ctx.fillStyle = TEXT;
  ctx.font = "16px system-ui, sans-serif";
  let y = 24;
  if (hud.score !== null) {
    ctx.font = "bold 28px system-ui, sans-serif";
    ctx.fillText(String(hud.score), 16, 36);
    ctx.font = "16px system-ui, sans-serif";
    y = 60;
  }
  if (hud.threshold !== null) {
    ctx.fillText(`threshold ${hud.threshold.toFixed(0)} bpm`, 16, y);
    y += 20;
  }
  if (hud.currentBpm !== null) {
    ctx.fillText(`heart rate ${hud.currentBpm.toFixed(0)} bpm`, 16, y);
    y += 20;
  }
  if (hud.multiplierActive) {
    ctx.fillStyle = "#b33c17";
    ctx.fillText("slowed −30%", 16, y);
    ctx.fillStyle = TEXT;
    y += 20;
  }
  if (hud.targetProgress !== null) {
    const barWidth = config.world_width - 32;
    ctx.strokeStyle = TEXT;
    ctx.strokeRect(16, config.world_height - 26, barWidth, 12);
    ctx.fillStyle = "#4a90b8";
    ctx.fillRect(16, config.world_height - 26, barWidth * hud.targetProgress, 12);
    ctx.fillStyle = TEXT;
  }
}

export function drawEndScreen(
  ctx: CanvasRenderingContext2D,
  config: GameConfigWire,
  end: SessionEndFrame,
): void {
  const w = config.world_width;
  const h = config.world_height;
  ctx.fillStyle = "rgba(28, 43, 51, 0.75)";
  ctx.fillRect(0, 0, w, h);
  ctx.fillStyle = "#ffffff";
  ctx.textAlign = "center";
  ctx.font = "bold 32px system-ui, sans-serif";
  ctx.fillText(end.reason === "success" ? "Target reached!" : "Game over", w / 2, h / 2 - 40);
  ctx.font = "20px system-ui, sans-serif";
  ctx.fillText(`score ${end.final_score}  ·  ${end.duration_s.toFixed(1)} s`, w / 2, h / 2);
  ctx.font = "14px system-ui, sans-serif";
  ctx.fillText(`(${end.reason})`, w / 2, h / 2 + 26);
  ctx.textAlign = "start";
}
