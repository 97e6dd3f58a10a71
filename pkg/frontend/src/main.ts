// Page wiring: query parameters pick the server, level, and HR source;
// the render loop consumes the newest server frame (one-frame buffer);
// taps and spacebar send inputs; after the session ends the
// questionnaire forms post to the relay.
//
// Query parameters: ?server=ws://host:port&level=3&mode=manual
//   server   relay address (default ws://127.0.0.1:8777)
//   session  join this session as an observer instead of opening one
//   level    1 | 2 | 3 (default 3)
//   mode     manual | scripted | passthrough (default manual)
//   experiment  when "1", hides the slider and locks live passthrough

import { SessionClient } from "./client.js";
import { emptyHud, hudFromState } from "./hud.js";
import { ManualSlider, ScriptedSource, makeSampler, type HrSampler } from "./hrSource.js";
import { levelSpec, type SessionEndFrame, type StateFrame } from "./protocol.js";
import { drawEndScreen, drawFrame } from "./render.js";
import { PXI_CONSTRUCTS, validatePanas, validatePxi, type PxiItem } from "./validation.js";

const params = new URLSearchParams(location.search);
const serverUrl = params.get("server") ?? "ws://127.0.0.1:8777";
const levelId = (Number(params.get("level") ?? "3") as 1 | 2 | 3) || 3;
const joinSession = params.get("session");
const experiment = params.get("experiment") === "1";
const mode = experiment ? "passthrough" : (params.get("mode") ?? "manual");

const canvas = document.getElementById("game") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusLine = document.getElementById("status")!;
const startButton = document.getElementById("start") as HTMLButtonElement;
const sliderWrap = document.getElementById("slider-wrap")!;
const slider = document.getElementById("hr-slider") as HTMLInputElement;
const sliderValue = document.getElementById("hr-value")!;
const questionnaires = document.getElementById("questionnaires")!;

const client = new SessionClient(serverUrl);
let sampler: HrSampler = makeSampler({ mode: mode as "manual" | "scripted" | "passthrough",
  ...(mode === "scripted" ? { profile: [{ from_s: 0, bpm: 70 }, { from_s: 20, bpm: 92 }, { from_s: 30, bpm: 70 }] } : {}) });
let hrTimer: ReturnType<typeof setInterval> | null = null;
let sessionEpoch = 0;
let endFrame: SessionEndFrame | null = null;

if (mode !== "manual") sliderWrap.style.display = "none";
slider.addEventListener("input", () => {
  sliderValue.textContent = slider.value;
  if (sampler instanceof ManualSlider) sampler.set(Number(slider.value));
});

function setStatus(text: string): void {
  statusLine.textContent = text;
}

function startHrPump(): void {
  if (hrTimer !== null) return;
  hrTimer = setInterval(() => {
    const t = (Date.now() - sessionEpoch) / 1000;
    const bpm = sampler.sample(t);
    if (bpm !== null) {
      client.sendHr(bpm, Math.round(t * 1000)).catch(() => {});
    }
  }, 1000);
}

function stopHrPump(): void {
  if (hrTimer !== null) clearInterval(hrTimer);
  hrTimer = null;
}

client.onStatus = (frame) => {
  if (frame.phase === "collecting_baseline") {
    setStatus(`measuring resting heart rate… ${frame.baseline_collected ?? 0}/${frame.baseline_needed ?? 5}`);
  } else if (frame.phase === "ready") {
    const threshold = frame.threshold !== undefined ? ` (threshold ${frame.threshold.toFixed(0)} bpm)` : "";
    setStatus(`ready${threshold} — tap to start`);
  }
};

client.onEnd = (frame) => {
  endFrame = frame;
  stopHrPump();
  setStatus(`session over: ${frame.reason}, score ${frame.final_score}`);
  showQuestionnaires();
};

client.onError = (code, message) => setStatus(`error ${code}: ${message}`);
client.onClose = () => {
  stopHrPump();
  if (!endFrame) setStatus("disconnected — reload to reconnect (session aborted locally)");
};

function tap(): void {
  if (!endFrame && client.sessionId) client.tap().catch(() => {});
}

canvas.addEventListener("pointerdown", tap);
window.addEventListener("keydown", (ev) => {
  if (ev.code === "Space") {
    ev.preventDefault();
    tap();
  }
});

function renderLoop(): void {
  const state: StateFrame | null = client.lastState;
  if (state && client.config && client.level) {
    const bpm = sampler.sample((Date.now() - sessionEpoch) / 1000);
    drawFrame(ctx, client.config, state, hudFromState(state, client.level, bpm));
    if (endFrame) drawEndScreen(ctx, client.config, endFrame);
  }
  requestAnimationFrame(renderLoop);
}

startButton.addEventListener("click", async () => {
  startButton.disabled = true;
  try {
    if (joinSession) {
      const info = await client.join(joinSession, "observer");
      setStatus(`observing ${info.sessionId}`);
    } else {
      const info = await client.openSession(levelSpec(levelId));
      sessionEpoch = Date.now();
      canvas.width = info.config.world_width;
      canvas.height = info.config.world_height;
      setStatus(`session ${info.sessionId} (level ${info.level.level_id})`);
      if (info.level.hr_adaptive) startHrPump();
    }
    renderLoop();
  } catch (err) {
    setStatus(String(err));
    startButton.disabled = false;
  }
});

// -- questionnaires ----------------------------------------------------------

function numberSelect(min: number, max: number): HTMLSelectElement {
  const select = document.createElement("select");
  for (let v = min; v <= max; v++) {
    const option = document.createElement("option");
    option.value = String(v);
    option.textContent = String(v);
    select.append(option);
  }
  return select;
}

const PANAS_POSITIVE = ["interested", "excited", "strong", "enthusiastic", "proud",
  "alert", "inspired", "determined", "attentive", "active"];
const PANAS_NEGATIVE = ["distressed", "upset", "guilty", "scared", "hostile",
  "irritable", "ashamed", "nervous", "jittery", "afraid"];

function showQuestionnaires(): void {
  questionnaires.style.display = "block";
  questionnaires.innerHTML = "";

  const panas = document.createElement("fieldset");
  panas.innerHTML = "<legend>How do you feel right now? (1 = not at all … 5 = very much)</legend>";
  const panasSelects: HTMLSelectElement[] = [];
  for (const word of [...PANAS_POSITIVE, ...PANAS_NEGATIVE]) {
    const label = document.createElement("label");
    label.textContent = word + " ";
    const select = numberSelect(1, 5);
    panasSelects.push(select);
    label.append(select);
    panas.append(label);
  }
  const panasSubmit = document.createElement("button");
  panasSubmit.textContent = "Submit affect ratings";
  const panasMsg = document.createElement("span");
  panasSubmit.addEventListener("click", async () => {
    const items = panasSelects.map((s) => Number(s.value));
    const check = validatePanas(items);
    if (!check.ok) {
      panasMsg.textContent = check.errors[0] ?? "invalid";
      return;
    }
    const ack = await client.submitQuestionnaire("panas", items);
    panasMsg.textContent = ack.status === "ok" ? "recorded ✓" : `rejected: ${ack.detail}`;
  });
  panas.append(panasSubmit, panasMsg);

  const pxi = document.createElement("fieldset");
  pxi.innerHTML = "<legend>Player experience (−3 = strongly disagree … 3 = strongly agree)</legend>";
  const pxiSelects: { construct: string; select: HTMLSelectElement }[] = [];
  for (const construct of PXI_CONSTRUCTS) {
    for (let i = 1; i <= 3; i++) {
      const label = document.createElement("label");
      label.textContent = `${construct} ${i} `;
      const select = numberSelect(-3, 3);
      select.value = "0";
      pxiSelects.push({ construct, select });
      label.append(select);
      pxi.append(label);
    }
  }
  const pxiSubmit = document.createElement("button");
  pxiSubmit.textContent = "Submit experience ratings";
  const pxiMsg = document.createElement("span");
  pxiSubmit.addEventListener("click", async () => {
    const items: PxiItem[] = pxiSelects.map(({ construct, select }) => ({
      construct,
      value: Number(select.value),
    }));
    const check = validatePxi(items);
    if (!check.ok) {
      pxiMsg.textContent = check.errors[0] ?? "invalid";
      return;
    }
    const ack = await client.submitQuestionnaire("pxi", items);
    pxiMsg.textContent = ack.status === "ok" ? "recorded ✓" : `rejected: ${ack.detail}`;
  });
  pxi.append(pxiSubmit, pxiMsg);

  questionnaires.append(panas, pxi);
}
