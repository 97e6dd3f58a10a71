// Heart-rate sources the client can feed into a session: a manual slider
// (demos and tests), a scripted step-function profile, or live
// passthrough where an external sensor connects on its own socket and
// the page sends nothing.

export type HrMode = "manual" | "scripted" | "passthrough";

export interface ProfilePoint {
  from_s: number;
  bpm: number;
}

export interface HrSourceConfig {
  mode: HrMode;
  profile?: ProfilePoint[];
  passthroughEndpoint?: string;
}

export function validateHrSourceConfig(config: HrSourceConfig): string[] {
  const errors: string[] = [];
  if (config.mode === "scripted") {
    if (!config.profile || config.profile.length === 0) {
      errors.push("scripted mode requires a profile");
    } else {
      if (config.profile[0]!.from_s !== 0) errors.push("profile must start at t=0");
      for (let i = 1; i < config.profile.length; i++) {
        if (config.profile[i]!.from_s <= config.profile[i - 1]!.from_s) {
          errors.push("profile times must be strictly increasing");
          break;
        }
      }
    }
  } else if (config.profile) {
    errors.push(`mode "${config.mode}" does not take a profile`);
  }
  return errors;
}

export interface HrSampler {
  /** bpm to send at session time t (seconds), or null when this client
   * is not the sensor (passthrough). */
  sample(t: number): number | null;
}

export class ManualSlider implements HrSampler {
  constructor(public value = 70) {}

  set(value: number): void {
    this.value = value;
  }

  sample(_t: number): number {
    return this.value;
  }
}

export class ScriptedSource implements HrSampler {
  constructor(private profile: ProfilePoint[]) {
    const errors = validateHrSourceConfig({ mode: "scripted", profile });
    if (errors.length) throw new Error(errors.join("; "));
  }

  sample(t: number): number {
    let value = this.profile[0]!.bpm;
    for (const point of this.profile) {
      if (point.from_s <= t) value = point.bpm;
      else break;
    }
    return value;
  }
}

export class PassthroughSource implements HrSampler {
  sample(_t: number): null {
    return null;
  }
}

export function makeSampler(config: HrSourceConfig): HrSampler {
  const errors = validateHrSourceConfig(config);
  if (errors.length) throw new Error(errors.join("; "));
  switch (config.mode) {
    case "manual":
      return new ManualSlider();
    case "scripted":
      return new ScriptedSource(config.profile!);
    case "passthrough":
      return new PassthroughSource();
  }
}
