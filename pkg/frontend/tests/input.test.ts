import { describe, expect, it } from "vitest";

import { KeyTracker } from "../src/input.js";

describe("KeyTracker", () => {
  it("maps i/j/k/l to up/left/down/right", () => {
    for (const [key, dir] of [["i", "up"], ["j", "left"], ["k", "down"], ["l", "right"]] as const) {
      const keys = new KeyTracker();
      expect(keys.keydown(key)).toEqual({ type: "input", dir });
    }
  });

  it("arrow keys are aliases", () => {
    const keys = new KeyTracker();
    expect(keys.keydown("ArrowRight")).toEqual({ type: "input", dir: "right" });
    keys.reset();
    expect(keys.keydown("ArrowUp")).toEqual({ type: "input", dir: "up" });
  });

  it("press then release produces dir then null", () => {
    const keys = new KeyTracker();
    expect(keys.keydown("l")).toEqual({ type: "input", dir: "right" });
    expect(keys.keyup("l")).toEqual({ type: "input", dir: null });
  });

  it("unmapped keys produce nothing", () => {
    const keys = new KeyTracker();
    expect(keys.keydown("q")).toBeNull();
    expect(keys.keyup("q")).toBeNull();
  });

  it("auto-repeat produces nothing", () => {
    const keys = new KeyTracker();
    expect(keys.keydown("i")).not.toBeNull();
    expect(keys.keydown("i", true)).toBeNull();
    expect(keys.keydown("i")).toBeNull(); // same direction still held
  });

  it("one frame per transition when switching keys", () => {
    const keys = new KeyTracker();
    expect(keys.keydown("i")).toEqual({ type: "input", dir: "up" });
    expect(keys.keydown("l")).toEqual({ type: "input", dir: "right" });
    // releasing the superseded key must not clear the new hold
    expect(keys.keyup("i")).toBeNull();
    expect(keys.heldDirection).toBe("right");
    expect(keys.keyup("l")).toEqual({ type: "input", dir: null });
    expect(keys.heldDirection).toBeNull();
  });

  it("alias release clears a key press of the same direction", () => {
    const keys = new KeyTracker();
    keys.keydown("l");
    expect(keys.keyup("ArrowRight")).toEqual({ type: "input", dir: null });
  });
});
