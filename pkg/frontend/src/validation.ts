// Client-side questionnaire validation, mirroring the server's rules so
// a bad submission is caught before it leaves the page.

export const PANAS_ITEMS = 20; // 10 positive then 10 negative
export const PANAS_MIN = 1;
export const PANAS_MAX = 5;

export const PXI_CONSTRUCTS = [
  "Ease of Control",
  "Challenge",
  "Progress Feedback",
  "Goals and Rules",
  "Audio-visual Appeal",
  "Meaning",
  "Immersion",
  "Mastery",
  "Curiosity",
  "Autonomy",
] as const;

export const PXI_ITEMS_PER_CONSTRUCT = 3;
export const PXI_MIN = -3;
export const PXI_MAX = 3;

export interface PxiItem {
  construct: string;
  value: number;
}

export interface ValidationResult {
  ok: boolean;
  errors: string[];
}

function isInt(v: unknown): v is number {
  return typeof v === "number" && Number.isInteger(v);
}

export function validatePanas(items: unknown[]): ValidationResult {
  const errors: string[] = [];
  if (items.length !== PANAS_ITEMS) {
    errors.push(`need ${PANAS_ITEMS} items (10 positive then 10 negative), got ${items.length}`);
  }
  items.forEach((v, i) => {
    if (!isInt(v) || v < PANAS_MIN || v > PANAS_MAX) {
      const scale = i < 10 ? "positive" : "negative";
      errors.push(`${scale} item ${(i % 10) + 1} must be an integer in [${PANAS_MIN}, ${PANAS_MAX}], got ${String(v)}`);
    }
  });
  return { ok: errors.length === 0, errors };
}

export function validatePxi(items: PxiItem[]): ValidationResult {
  const errors: string[] = [];
  if (items.length !== 30 && items.length !== 33) {
    errors.push(`need 30 or 33 items, got ${items.length}`);
  }
  const counts = new Map<string, number>();
  for (const item of items) {
    if (!isInt(item.value) || item.value < PXI_MIN || item.value > PXI_MAX) {
      errors.push(`item for "${item.construct}" must be an integer in [${PXI_MIN}, ${PXI_MAX}], got ${String(item.value)}`);
    }
    counts.set(item.construct, (counts.get(item.construct) ?? 0) + 1);
  }
  for (const construct of PXI_CONSTRUCTS) {
    const have = counts.get(construct) ?? 0;
    if (have !== PXI_ITEMS_PER_CONSTRUCT) {
      errors.push(`construct "${construct}" needs exactly ${PXI_ITEMS_PER_CONSTRUCT} items, got ${have}`);
    }
  }
  return { ok: errors.length === 0, errors };
}
