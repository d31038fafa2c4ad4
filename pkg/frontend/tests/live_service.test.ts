/** Integration: the built UI against a live annotation service.
 *
 *  Spawns `stereobench synth` and `stereobench annotate-serve` from the
 *  parent package, then drives the real DOM app with real HTTP. Stereo
 *  frame images are fetched directly (jsdom does not decode images).
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AnnotatorApp } from "../src/app.js";

const PYTHON = process.env.PYTHON ?? "python3";
const PORT = 8861 + (process.pid % 100);
const BASE = `http://127.0.0.1:${PORT}`;

let serverProc: ChildProcess | null = null;
let workDir: string;

// node's fetch; jsdom's window does not provide one
const nodeFetch = (input: string, init?: RequestInit) => fetch(input, init);

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt++) {
    try {
      const response = await nodeFetch(`${BASE}/api/videos`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("annotation service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "annotator-live-"));
  const synth = spawnSync(PYTHON, [
    "-m", "stereobench.cli", "synth", "--out", join(workDir, "ds"),
    "--videos", "1", "--seed", "5", "--frames", "16",
  ], { stdio: "pipe" });
  if (synth.status !== 0) {
    throw new Error(`synth failed: ${synth.stderr}`);
  }
  serverProc = spawn(PYTHON, [
    "-m", "stereobench.cli", "annotate-serve",
    "--dataset", join(workDir, "ds"),
    "--host", "127.0.0.1", "--port", String(PORT),
  ], { stdio: "pipe" });
  await waitForServer();
});

afterAll(() => {
  serverProc?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

describe("live service", () => {
  it("serves decodable stereo frame images", async () => {
    const api = new ApiClient(BASE, nodeFetch);
    const videos = await api.listVideos();
    expect(videos).toHaveLength(1);
    const url = api.imageUrl(videos[0]!.id, 0, "left");
    const response = await nodeFetch(url);
    expect(response.status).toBe(200);
    expect(response.headers.get("content-type")).toBe("image/png");
    const bytes = new Uint8Array(await response.arrayBuffer());
    // PNG signature
    expect(Array.from(bytes.slice(0, 4))).toEqual([0x89, 0x50, 0x4e, 0x47]);
  });

  it("renders frames and completes the click -> snap -> bbox loop", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    const app = new AnnotatorApp(root, new ApiClient(BASE, nodeFetch));
    await app.init();

    const images = root.querySelectorAll("img");
    expect(images[0]!.src).toContain(`${BASE}/api/videos/`);
    expect(images[0]!.src).toContain("/image/left");
    expect(images[1]!.src).toContain("/image/right");

    const video = app.state.video!;
    expect(video.frame_count).toBeGreaterThan(10);

    // click the left view, then the right view off the epipolar line
    const left = root.querySelector('.panel[data-view="left"]')!;
    left.dispatchEvent(new MouseEvent("click", {
      bubbles: true, clientX: 140, clientY: 120,
    }));
    expect(app.state.pendingLeft).toEqual([140, 120]);
    await app.placeRightClick(112);

    const label = app.state.label!;
    expect(label.kpt_left).toEqual([140, 120]);
    expect(label.kpt_right).toEqual([112, 120]); // snapped server-side
    expect(label.bbox_left).not.toBeNull();
    expect(label.bbox_right).not.toBeNull();
    // the sphere-derived box pair shares v extents and encloses the click
    const [lu0, lv0, lu1, lv1] = label.bbox_left!;
    const [, rv0, , rv1] = label.bbox_right!;
    expect(lv0).toBeCloseTo(rv0, 6);
    expect(lv1).toBeCloseTo(rv1, 6);
    expect(lu0).toBeLessThan(140);
    expect(lu1).toBeGreaterThan(140);
    expect(lv0).toBeLessThan(120);
    expect(lv1).toBeGreaterThan(120);

    // boxes are drawn in both overlay layers
    expect(left.querySelector("svg")!.innerHTML).toContain('class="bbox"');
    expect(root.querySelector('.panel[data-view="right"] svg')!.innerHTML)
      .toContain('class="bbox"');
  });

  it("rejects a non-positive disparity with an inline banner", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    const app = new AnnotatorApp(root, new ApiClient(BASE, nodeFetch));
    await app.init();
    await app.loadFrame(1);

    const left = root.querySelector('.panel[data-view="left"]')!;
    left.dispatchEvent(new MouseEvent("click", {
      bubbles: true, clientX: 100, clientY: 90,
    }));
    await app.placeRightClick(150); // u_right > u_left
    const banner = root.querySelector("#banner") as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toMatch(/disparity/);
  });
});
