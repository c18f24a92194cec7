import { Dir, InputFrame } from "./protocol.js";

// i/j/k/l move up/left/down/right; arrow keys are aliases.
const KEY_TO_DIR: Record<string, Dir> = {
  i: "up",
  j: "left",
  k: "down",
  l: "right",
  ArrowUp: "up",
  ArrowLeft: "left",
  ArrowDown: "down",
  ArrowRight: "right",
};

/**
 * Turns raw key events into input frames, one frame per keyboard transition:
 * pressing a movement key holds that direction (a later press replaces it),
 * releasing the held key clears it. Auto-repeat produces nothing.
 */
export class KeyTracker {
  private held: Dir | null = null;

  get heldDirection(): Dir | null {
    return this.held;
  }

  keydown(key: string, repeat = false): InputFrame | null {
    const dir = KEY_TO_DIR[key];
    if (!dir || repeat) return null;
    if (dir === this.held) return null;
    this.held = dir;
    return { type: "input", dir };
  }

  keyup(key: string): InputFrame | null {
    const dir = KEY_TO_DIR[key];
    if (!dir) return null;
    // releasing a key that is no longer the held direction changes nothing
    if (dir !== this.held) return null;
    this.held = null;
    return { type: "input", dir: null };
  }

  reset(): void {
    this.held = null;
  }
}
