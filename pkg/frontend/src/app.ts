/** DOM wiring: two zoomable stereo panels, click-to-place keypoints with the
 *  right view held to the left click's epipolar line, flag toggles, frame
 *  stepping, previous-frame ghost and review-queue navigation.
 *
 *  Every write goes through the service; the UI re-renders only from server
 *  replies, so nothing client-side can drift from the persisted labels. */

import { ApiClient, ApiError } from "./api.js";
import { cssTransform, screenToImage, zoomAt, panBy, IDENTITY } from "./geometry.js";
import { overlayShapes, shapeToSvg } from "./overlay.js";
import {
  ViewState,
  canPlaceKeypoints,
  clampFrame,
  clearPending,
  initialState,
  nextReviewFrame,
  placeLeftClick,
  stepFrame,
} from "./state.js";
import type { Pair, View, VideoInfo } from "./types.js";

const REVIEW_THRESHOLD_PX = 5.0;

export class AnnotatorApp {
  state: ViewState = initialState();
  private videos: VideoInfo[] = [];
  private panels!: Record<View, HTMLElement>;

  constructor(private readonly root: HTMLElement,
              private readonly api: ApiClient) {
    this.buildDom();
  }

  private buildDom(): void {
    this.root.innerHTML = `
      <header class="bar">
        <select id="video-select"></select>
        <span id="frame-indicator">no video</span>
        <span class="spacer"></span>
        <button id="flag-difficult" title="toggle difficult [d]">difficult</button>
        <button id="flag-visible" title="toggle visible [v]">visible</button>
        <button id="toggle-bbox" title="toggle box overlay [b]">boxes</button>
        <button id="toggle-ghost" title="toggle previous-frame ghost [g]">ghost</button>
        <button id="review-next" title="jump to next drift-flagged frame [r]">review</button>
      </header>
      <div id="banner" class="banner" hidden></div>
      <main class="views">
        <div class="panel" data-view="left">
          <div class="inner">
            <img alt="left frame" draggable="false">
            <svg xmlns="http://www.w3.org/2000/svg"></svg>
          </div>
        </div>
        <div class="panel" data-view="right">
          <div class="inner">
            <img alt="right frame" draggable="false">
            <svg xmlns="http://www.w3.org/2000/svg"></svg>
          </div>
        </div>
      </main>
      <footer id="review-list"></footer>`;
    this.panels = {
      left: this.root.querySelector('.panel[data-view="left"]') as HTMLElement,
      right: this.root.querySelector('.panel[data-view="right"]') as HTMLElement,
    };
    this.bindEvents();
  }

  private bindEvents(): void {
    const select = this.query<HTMLSelectElement>("#video-select");
    select.addEventListener("change", () => {
      void this.selectVideo(select.value);
    });
    this.query("#flag-difficult").addEventListener("click", () => {
      void this.toggleFlag("difficult");
    });
    this.query("#flag-visible").addEventListener("click", () => {
      void this.toggleFlag("visible");
    });
    this.query("#toggle-bbox").addEventListener("click", () => {
      this.state.overlays.bbox = !this.state.overlays.bbox;
      this.renderOverlays();
    });
    this.query("#toggle-ghost").addEventListener("click", () => {
      this.state.overlays.ghost = !this.state.overlays.ghost;
      this.renderOverlays();
    });
    this.query("#review-next").addEventListener("click", () => {
      void this.jumpToNextReviewFrame();
    });

    for (const view of ["left", "right"] as View[]) {
      const panel = this.panels[view];
      panel.addEventListener("click", (event) => {
        void this.onPanelClick(view, event as MouseEvent);
      });
      panel.addEventListener("wheel", (event) => {
        event.preventDefault();
        const [x, y] = this.panelPoint(view, event as WheelEvent);
        const factor = (event as WheelEvent).deltaY < 0 ? 1.2 : 1 / 1.2;
        this.state.zoom[view] = zoomAt(this.state.zoom[view], x, y, factor);
        this.applyViewTransforms();
      });
      panel.addEventListener("pointermove", (event) => {
        const pointer = event as PointerEvent;
        if (pointer.buttons === 4 || (pointer.buttons === 1 && pointer.shiftKey)) {
          this.state.zoom[view] = panBy(this.state.zoom[view],
                                        pointer.movementX, pointer.movementY);
          this.applyViewTransforms();
        }
      });
    }

    this.root.ownerDocument.addEventListener("keydown", (event) => {
      void this.onKey(event as KeyboardEvent);
    });
  }

  private query<T extends Element = HTMLElement>(selector: string): T {
    const el = this.root.querySelector(selector);
    if (!el) throw new Error(`missing element ${selector}`);
    return el as T;
  }

  async init(): Promise<void> {
    this.videos = await this.api.listVideos();
    const select = this.query<HTMLSelectElement>("#video-select");
    select.innerHTML = this.videos
      .map((v) => `<option value="${v.id}">${v.case}/${v.id}</option>`)
      .join("");
    if (this.videos.length > 0) {
      await this.selectVideo(this.videos[0]!.id);
    }
  }

  async selectVideo(videoId: string): Promise<void> {
    const video = this.videos.find((v) => v.id === videoId);
    if (!video) return;
    this.state = { ...initialState(), video };
    this.state.zoom = { left: { ...IDENTITY }, right: { ...IDENTITY } };
    await this.refreshReviewQueue();
    await this.loadFrame(0);
  }

  async loadFrame(frame: number): Promise<void> {
    const video = this.state.video;
    if (!video) return;
    frame = clampFrame(this.state, frame);
    const envelope = await this.api.getFrame(video.id, frame);
    const prev = frame > 0 ? await this.api.getFrame(video.id, frame - 1) : null;
    this.state.frame = frame;
    this.state.revision = envelope.revision;
    this.state.label = envelope.label;
    this.state.prevLabel = prev ? prev.label : null;
    this.state.pendingLeft = null;
    for (const view of ["left", "right"] as View[]) {
      const img = this.panels[view].querySelector("img") as HTMLImageElement;
      img.src = this.api.imageUrl(video.id, frame, view);
      img.width = video.width;
      img.height = video.height;
      const svg = this.panels[view].querySelector("svg") as SVGSVGElement;
      svg.setAttribute("viewBox", `0 0 ${video.width} ${video.height}`);
      svg.setAttribute("width", String(video.width));
      svg.setAttribute("height", String(video.height));
    }
    this.render();
  }

  private panelPoint(view: View, event: MouseEvent): Pair {
    const rect = this.panels[view].getBoundingClientRect();
    return [event.clientX - rect.left, event.clientY - rect.top];
  }

  async onPanelClick(view: View, event: MouseEvent): Promise<void> {
    if (event.shiftKey) return; // shift-drag pans
    const [sx, sy] = this.panelPoint(view, event);
    const [u, v] = screenToImage(this.state.zoom[view], sx, sy);
    if (view === "left") {
      this.state = placeLeftClick(this.state, [u, v]);
      this.render();
      return;
    }
    await this.placeRightClick(u);
  }

  /** The right-view click completes the pair: its v is the guide line's. */
  async placeRightClick(u: number): Promise<void> {
    const pending = this.state.pendingLeft;
    const video = this.state.video;
    if (!pending || !video) {
      this.setBanner("place the left-view keypoint first");
      return;
    }
    try {
      const reply = await this.api.putKeypoints(
        video.id, this.state.frame, pending, [u, pending[1]],
        this.state.revision);
      this.state.revision = reply.revision;
      this.state = clearPending(this.state);
      // no client-only truth: re-read the persisted label
      const envelope = await this.api.getFrame(video.id, this.state.frame);
      this.state.label = envelope.label;
      this.state.revision = envelope.revision;
      this.setBanner(null);
      this.render();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.setBanner("labels changed elsewhere; reloading frame");
        await this.loadFrame(this.state.frame);
        return;
      }
      if (error instanceof ApiError) {
        this.setBanner(error.message);
        this.render();
        return;
      }
      throw error;
    }
  }

  async toggleFlag(which: "difficult" | "visible"): Promise<void> {
    const video = this.state.video;
    const label = this.state.label;
    if (!video || !label) return;
    const difficult = which === "difficult"
      ? !label.is_difficult : label.is_difficult;
    const visible = which === "visible"
      ? !label.is_visible_in_both_stereo : label.is_visible_in_both_stereo;
    try {
      const reply = await this.api.putFlags(
        video.id, this.state.frame, difficult, visible, this.state.revision);
      this.state.revision = reply.revision;
      this.state.label = reply.label;
      this.setBanner(null);
      this.render();
    } catch (error) {
      if (error instanceof ApiError) {
        this.setBanner(error.message);
        if (error.status === 409) await this.loadFrame(this.state.frame);
        return;
      }
      throw error;
    }
  }

  async refreshReviewQueue(): Promise<void> {
    const video = this.state.video;
    if (!video) return;
    const diff = await this.api.reviewDiff(video.id, REVIEW_THRESHOLD_PX);
    this.state.reviewQueue = diff.frames.map((f) => f.frame);
    this.renderReviewList();
  }

  async jumpToNextReviewFrame(): Promise<void> {
    await this.refreshReviewQueue();
    const next = nextReviewFrame(this.state);
    if (next === null) {
      this.setBanner("review queue is empty");
      this.render();
      return;
    }
    await this.loadFrame(next);
  }

  async onKey(event: KeyboardEvent): Promise<void> {
    switch (event.key) {
      case "ArrowRight":
        await this.loadFrame(stepFrame(this.state, 1));
        break;
      case "ArrowLeft":
        await this.loadFrame(stepFrame(this.state, -1));
        break;
      case "d":
        await this.toggleFlag("difficult");
        break;
      case "v":
        await this.toggleFlag("visible");
        break;
      case "b":
        this.state.overlays.bbox = !this.state.overlays.bbox;
        this.renderOverlays();
        break;
      case "g":
        this.state.overlays.ghost = !this.state.overlays.ghost;
        this.renderOverlays();
        break;
      case "r":
        await this.jumpToNextReviewFrame();
        break;
      case "Escape":
        this.state = clearPending(this.state);
        this.render();
        break;
    }
  }

  setBanner(message: string | null): void {
    this.state.banner = message;
    const banner = this.query("#banner");
    banner.textContent = message ?? "";
    (banner as HTMLElement).hidden = message === null;
  }

  private applyViewTransforms(): void {
    for (const view of ["left", "right"] as View[]) {
      const inner = this.panels[view].querySelector(".inner") as HTMLElement;
      inner.style.transform = cssTransform(this.state.zoom[view]);
      inner.style.transformOrigin = "0 0";
    }
  }

  renderOverlays(): void {
    const width = this.state.video?.width ?? 0;
    for (const view of ["left", "right"] as View[]) {
      const svg = this.panels[view].querySelector("svg") as SVGSVGElement;
      svg.innerHTML = overlayShapes(this.state, view)
        .map((shape) => shapeToSvg(shape, width))
        .join("");
    }
  }

  render(): void {
    const video = this.state.video;
    const label = this.state.label;
    const indicator = this.query("#frame-indicator");
    indicator.textContent = video
      ? `${video.id} · frame ${this.state.frame + 1}/${video.frame_count}`
      : "no video";
    const difficultBtn = this.query<HTMLButtonElement>("#flag-difficult");
    const visibleBtn = this.query<HTMLButtonElement>("#flag-visible");
    difficultBtn.classList.toggle("active", label?.is_difficult ?? false);
    visibleBtn.classList.toggle("active",
                                label?.is_visible_in_both_stereo ?? false);
    const locked = !canPlaceKeypoints(label);
    for (const view of ["left", "right"] as View[]) {
      this.panels[view].classList.toggle("locked", locked);
    }
    const banner = this.query("#banner");
    banner.textContent = this.state.banner ?? "";
    (banner as HTMLElement).hidden = this.state.banner === null;
    this.applyViewTransforms();
    this.renderOverlays();
    this.renderReviewList();
  }

  private renderReviewList(): void {
    const list = this.query("#review-list");
    if (this.state.reviewQueue.length === 0) {
      list.textContent = "";
      return;
    }
    list.textContent =
      `drift-flagged frames: ${this.state.reviewQueue.join(", ")}`;
  }
}

export function createApp(root: HTMLElement, api: ApiClient): AnnotatorApp {
  return new AnnotatorApp(root, api);
}
