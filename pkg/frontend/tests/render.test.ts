import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { ServerMessage, ViewMessage } from "../src/protocol.js";
import { FOOD_COLOR, MARKER_COLOR, renderView } from "../src/render.js";
import { ClientState } from "../src/state.js";

const here = dirname(fileURLToPath(import.meta.url));
const transcript: ServerMessage[] = JSON.parse(
  readFileSync(join(here, "fixtures", "invisible_food_transcript.json"), "utf-8"),
);

interface Op {
  op: string;
  fillStyle?: string;
  strokeStyle?: string;
  args: number[];
}

/** Records every draw call with the style active at the time. */
class FakeCtx {
  fillStyle = "";
  strokeStyle = "";
  lineWidth = 0;
  font = "";
  textAlign = "";
  textBaseline = "";
  ops: Op[] = [];

  private log(op: string, args: number[]): void {
    this.ops.push({ op, fillStyle: this.fillStyle, strokeStyle: this.strokeStyle, args });
  }

  fillRect(...args: number[]): void { this.log("fillRect", args); }
  strokeRect(...args: number[]): void { this.log("strokeRect", args); }
  clearRect(...args: number[]): void { this.log("clearRect", args); }
  fillText(_text: string, ...args: number[]): void { this.log("fillText", args); }
  beginPath(): void { this.log("beginPath", []); }
  arc(...args: number[]): void { this.log("arc", args); }
  fill(): void { this.log("fill", []); }
  stroke(): void { this.log("stroke", []); }
}

const CELL = 10;
const WORLD = { width: 16, height: 16 };
const HUD = { score: 0, countdown: 0, status: "" };

function cellOfRect(args: number[], exact = true): [number, number] {
  const [px, py] = args;
  const x = exact ? px / CELL : Math.floor(px / CELL);
  const y = WORLD.height - 1 - (exact ? py / CELL : Math.floor(py / CELL));
  return [x, y];
}

function makeView(partial: Partial<ViewMessage>): ViewMessage {
  const self = { id: "p0", icon: "heart", x: 3, y: 4, color: "purple" };
  return {
    type: "view",
    t: 0.5,
    self,
    food: [],
    markers: [],
    foragers: [self],
    score: 0,
    ...partial,
  };
}

describe("renderView", () => {
  it("draws food as green squares at their cells", () => {
    const ctx = new FakeCtx();
    const view = makeView({ food: [[2, 5, 1], [7, 7, 3]] });
    renderView(ctx, view, WORLD, HUD, CELL);
    const foodRects = ctx.ops.filter(
      (o) => o.op === "fillRect" && o.fillStyle === FOOD_COLOR,
    );
    expect(foodRects.map((o) => cellOfRect(o.args))).toEqual([[2, 5], [7, 7]]);
  });

  it("draws every forager in the view and nothing else", () => {
    const ctx = new FakeCtx();
    const other = { id: "p1", icon: "dog", x: 8, y: 8, color: "red" };
    const view = makeView({ foragers: [makeView({}).self, other] });
    renderView(ctx, view, WORLD, HUD, CELL);
    const disks = ctx.ops.filter((o) => o.op === "fill");
    expect(disks.length).toBe(2);
  });

  it("tints a red forager red", () => {
    const ctx = new FakeCtx();
    const other = { id: "p1", icon: "dog", x: 8, y: 8, color: "red" };
    const view = makeView({ foragers: [makeView({}).self, other] });
    renderView(ctx, view, WORLD, HUD, CELL);
    const arcFills = ctx.ops.filter(
      (o) => o.op === "arc" && o.fillStyle.includes("d64545"),
    );
    expect(arcFills.length).toBe(1);
  });

  it("renders the HUD score and countdown", () => {
    const ctx = new FakeCtx();
    renderView(ctx, makeView({ score: 12 }), WORLD,
      { score: 12, countdown: 42.2, status: "" }, CELL);
    const texts = ctx.ops.filter((o) => o.op === "fillText");
    expect(texts.length).toBeGreaterThan(0);
  });

  it("stale view: rendering twice draws the same thing", () => {
    const a = new FakeCtx();
    const b = new FakeCtx();
    const view = makeView({ food: [[1, 1, 1]] });
    renderView(a, view, WORLD, HUD, CELL);
    renderView(b, view, WORLD, HUD, CELL);
    expect(a.ops).toEqual(b.ops);
  });
});

describe("hidden-information rendering against a recorded transcript", () => {
  it("under invisible food, draws no food cell except own markers", () => {
    const state = new ClientState();
    let viewsChecked = 0;
    let markerViewsChecked = 0;
    for (const msg of transcript) {
      state.apply(msg);
      if (msg.type !== "view") continue;
      const ctx = new FakeCtx();
      renderView(ctx, state.view, state.world, {
        score: state.score,
        countdown: state.countdown,
        status: "",
      }, CELL);

      // the condition hides food, so no green food square may ever appear
      const foodRects = ctx.ops.filter(
        (o) => o.op === "fillRect" && o.fillStyle === FOOD_COLOR,
      );
      expect(foodRects).toEqual([]);

      // marker outlines may only sit on the view's own marker cells
      const markerCells = new Set(msg.markers.map(([x, y]) => `${x},${y}`));
      const drawnMarkers = ctx.ops.filter(
        (o) => o.op === "strokeRect" && o.strokeStyle === MARKER_COLOR,
      );
      for (const op of drawnMarkers) {
        const [x, y] = cellOfRect([op.args[0] - 1, op.args[1] - 1]);
        expect(markerCells.has(`${x},${y}`)).toBe(true);
      }
      expect(drawnMarkers.length).toBe(msg.markers.length);
      viewsChecked += 1;
      if (msg.markers.length > 0) markerViewsChecked += 1;
    }
    expect(viewsChecked).toBeGreaterThan(100);
    expect(markerViewsChecked).toBeGreaterThan(10); // markers really appeared
  });

  it("transcript views carry food nowhere but markers somewhere", () => {
    const views = transcript.filter((m) => m.type === "view") as ViewMessage[];
    expect(views.every((v) => v.food.length === 0)).toBe(true);
    expect(views.some((v) => v.markers.length > 0)).toBe(true);
  });
});

describe("ClientState", () => {
  it("tracks join, game_start, views, game_over", () => {
    const state = new ClientState();
    state.apply({ type: "joined", id: "p3", icon: "star" });
    expect(state.id).toBe("p3");
    state.apply({
      type: "game_start", game_index: 0, game_seconds: 30,
      tick_seconds: 0.1, world: { width: 16, height: 16 },
      condition: { food_visible: false, foragers_visible: true, success_indicated: false },
    });
    expect(state.running).toBe(true);
    expect(state.countdown).toBe(30);
    state.apply(makeView({ t: 10, score: 4 }));
    expect(state.score).toBe(4);
    expect(state.countdown).toBe(20);
    state.apply({ type: "game_over", scores: [{ id: "p3", icon: "star", score: 4 }] });
    expect(state.running).toBe(false);
  });
});
