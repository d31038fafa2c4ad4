import type {
  FlagsReply,
  FrameEnvelope,
  KeypointsReply,
  Pair,
  ReviewDiffReply,
  VideoInfo,
  View,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client for the annotation service; all geometry stays server-side. */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listVideos(): Promise<VideoInfo[]> {
    return this.request("/api/videos");
  }

  getFrame(video: string, frame: number): Promise<FrameEnvelope> {
    return this.request(`/api/videos/${video}/frames/${frame}`);
  }

  imageUrl(video: string, frame: number, view: View): string {
    return `${this.base}/api/videos/${video}/frames/${frame}/image/${view}`;
  }

  putKeypoints(video: string, frame: number, kl: Pair, kr: Pair,
               revision: number): Promise<KeypointsReply> {
    return this.request(`/api/videos/${video}/frames/${frame}/keypoints`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ kl, kr, revision }),
    });
  }

  putFlags(video: string, frame: number, isDifficult: boolean,
           isVisible: boolean, revision: number): Promise<FlagsReply> {
    return this.request(`/api/videos/${video}/frames/${frame}/flags`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        is_difficult: isDifficult,
        is_visible_in_both_stereo: isVisible,
        revision,
      }),
    });
  }

  reviewDiff(video: string, threshold: number): Promise<ReviewDiffReply> {
    return this.request(
      `/api/videos/${video}/review-diff?threshold=${threshold}`);
  }
}
