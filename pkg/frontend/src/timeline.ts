/** Timeline editing: drag-to-create windows snapped to whole days, edits
 * committed only when windows stay non-crossing, and an undo history of
 * draft snapshots. All functions are pure; the DOM layer owns nothing. */

import { addDays, dayToIso, parseDay } from "./payload.js";
import type { EffectKind, ScenarioDraft, WindowDraft } from "./types.js";

let counter = 0;

export function freshWindowId(): string {
  counter += 1;
  return `w${counter}`;
}

/** Map a pixel position on the timeline to a whole-day ISO date. */
export function snapToDay(axisStart: string, axisDays: number, fraction: number): string {
  const clamped = Math.min(Math.max(fraction, 0), 1);
  return addDays(axisStart, Math.round(clamped * axisDays));
}

function crosses(a: WindowDraft, b: WindowDraft): boolean {
  const aFrom = parseDay(a.startDate);
  const aTo = aFrom + a.durationDays; // exclusive
  const bFrom = parseDay(b.startDate);
  const bTo = bFrom + b.durationDays;
  return aFrom < bTo && bFrom < aTo;
}

function anyCrossing(windows: WindowDraft[]): boolean {
  for (let i = 0; i < windows.length; i += 1) {
    for (let j = i + 1; j < windows.length; j += 1) {
      if (crosses(windows[i]!, windows[j]!)) return true;
    }
  }
  return false;
}

/** Replace the draft's windows if the edit keeps them non-crossing;
 * otherwise return the draft unchanged (the gesture is rejected). */
function commit(draft: ScenarioDraft, windows: WindowDraft[]): ScenarioDraft {
  if (anyCrossing(windows)) return draft;
  return { ...draft, windows };
}

export function dragCreateWindow(
  draft: ScenarioDraft,
  fromDate: string,
  toDate: string,
  effectKind: EffectKind,
  effectValue: number,
  id: string = freshWindowId(),
): ScenarioDraft {
  const a = parseDay(fromDate);
  const b = parseDay(toDate);
  const start = Math.min(a, b);
  const durationDays = Math.abs(b - a);
  if (durationDays < 1) return draft; // zero-length drags create nothing
  const windowDraft: WindowDraft = {
    id,
    startDate: dayToIso(start),
    durationDays,
    effectKind,
    effectValue,
  };
  const committed = commit(draft, [...draft.windows, windowDraft]);
  if (committed === draft) return draft;
  return { ...committed, selectedWindowId: id };
}

export function moveWindow(draft: ScenarioDraft, id: string, newStart: string): ScenarioDraft {
  const windows = draft.windows.map((w) =>
    w.id === id ? { ...w, startDate: dayToIso(parseDay(newStart)) } : w,
  );
  return commit(draft, windows);
}

export function resizeWindow(draft: ScenarioDraft, id: string, durationDays: number): ScenarioDraft {
  if (durationDays < 1) return draft;
  const windows = draft.windows.map((w) => (w.id === id ? { ...w, durationDays } : w));
  return commit(draft, windows);
}

export function removeWindow(draft: ScenarioDraft, id: string): ScenarioDraft {
  return {
    ...draft,
    windows: draft.windows.filter((w) => w.id !== id),
    selectedWindowId: draft.selectedWindowId === id ? null : draft.selectedWindowId,
  };
}

export function setEffect(
  draft: ScenarioDraft,
  id: string,
  effectKind: EffectKind,
  effectValue: number,
): ScenarioDraft {
  const windows = draft.windows.map((w) => (w.id === id ? { ...w, effectKind, effectValue } : w));
  return commit(draft, windows);
}

/** Snapshot history. Drafts are immutable, so snapshots are references. */
export class UndoHistory {
  private past: ScenarioDraft[] = [];
  private future: ScenarioDraft[] = [];

  constructor(private present: ScenarioDraft) {}

  current(): ScenarioDraft {
    return this.present;
  }

  apply(next: ScenarioDraft): ScenarioDraft {
    if (next !== this.present) {
      this.past.push(this.present);
      this.present = next;
      this.future = [];
    }
    return this.present;
  }

  undo(): ScenarioDraft {
    const prev = this.past.pop();
    if (prev !== undefined) {
      this.future.push(this.present);
      this.present = prev;
    }
    return this.present;
  }

  redo(): ScenarioDraft {
    const next = this.future.pop();
    if (next !== undefined) {
      this.past.push(this.present);
      this.present = next;
    }
    return this.present;
  }
}
