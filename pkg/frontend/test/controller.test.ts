import { describe, expect, it } from "vitest";
import { DashboardController } from "../src/controller.js";
import { recommendedAt } from "../src/hurwicz.js";
import { MemoryView, StubService } from "./helpers.js";

const PENALTIES = { V2: 1000, V3: 2000, V4: 5000 };

async function started(query = "") {
  const service = new StubService();
  const view = new MemoryView();
  const controller = new DashboardController(service.client(), view, query, {
    sleep: async () => {},
  });
  await controller.start();
  return { service, view, controller };
}

describe("initial load", () => {
  it("renders both sides from the fixture-backed experiment", async () => {
    const { view } = await started();
    expect(view.html.get("supplier-diagram")).toContain("α=0.855");
    expect(view.html.get("customer-regret")).toContain('data-min="-44240" data-max="300"');
    expect(view.text.get("status")).toContain("first-run");
  });

  it("regret cells equal the payload byte-for-byte", async () => {
    const { view, controller } = await started();
    const html = view.html.get("supplier-regret")!;
    for (const cell of controller.supplierRisk!.regret_table.cells) {
      expect(html).toContain(`(${cell.min}, ${cell.max})`);
    }
  });

  it("empty store shows a message instead of crashing", async () => {
    const service = new StubService();
    const view = new MemoryView();
    const empty = service.fetchLike;
    const client = new (await import("../src/api.js")).ApiClient("", async (url, init) => {
      if (new URL(url, "http://stub").pathname === "/experiments") {
        return new Response(JSON.stringify({ experiments: [] }), { status: 200 });
      }
      return empty(url, init);
    });
    const controller = new DashboardController(client, view, "");
    await controller.start();
    expect(view.text.get("status")).toContain("no experiments");
  });
});

describe("alpha slider", () => {
  it("recomputes the readout locally without re-querying the service", async () => {
    const { service, view, controller } = await started();
    const before = service.log.length;
    controller.setAlpha(0.9);
    expect(service.log.length).toBe(before);
    expect(view.html.get("supplier-diagram")).toContain('data-recommended="S1"');
    controller.setAlpha(0.2);
    expect(view.html.get("supplier-diagram")).toContain('data-recommended="S2"');
  });

  it("pushes the slider position into the URL", async () => {
    const { view, controller } = await started();
    controller.setAlpha(0.31);
    expect(view.urls.at(-1)).toContain("alpha=0.31");
  });
});

describe("what-if penalties", () => {
  it("flips the customer recommendation from V4 to V3 without a reload", async () => {
    const { service, view, controller } = await started();
    // before: raw first-run data, V4 recommended at the default alpha
    expect(recommendedAt(controller.customerRisk!.diagram.intervals, controller.state.alpha)).toBe(
      "V4",
    );
    const loadsBefore = service.log.filter((l) => l.includes("/results")).length;
    await controller.setPenalties(PENALTIES);
    // after: only a risk re-query happened (no page/experiment reload)
    expect(service.log.filter((l) => l.includes("/results")).length).toBe(loadsBefore);
    expect(recommendedAt(controller.customerRisk!.diagram.intervals, controller.state.alpha)).toBe(
      "V3",
    );
    expect(view.html.get("customer-diagram")).toContain('data-recommended="V3"');
    expect(view.urls.at(-1)).toContain("pen=V2%3A1000%2CV3%3A2000%2CV4%3A5000");
  });

  it("keeps the supplier side untouched", async () => {
    const { view, controller } = await started();
    const before = view.html.get("supplier-diagram");
    await controller.setPenalties(PENALTIES);
    expect(view.html.get("supplier-diagram")).toBe(before);
  });
});

describe("what-if inventory cap", () => {
  it("creates the derived run, polls progress, then switches the view", async () => {
    const { view, controller } = await started();
    const derived = await controller.applyInventoryCap(80);
    expect(derived).toBe("derived-80");
    expect(controller.state.experiment).toBe("derived-80");
    expect(view.html.get("lineage")).toContain('data-parent="first-run"');
    expect(view.html.get("lineage")).toContain("run.inventory_cap");
    expect(view.urls.at(-1)).toContain("exp=derived-80");
  });

  it("surfaces 422s inline", async () => {
    const { view, controller } = await started();
    const derived = await controller.applyInventoryCap(-1);
    expect(derived).toBeNull();
    expect(view.text.get("whatif-error")).toContain("invalid_request");
  });
});

describe("decision recording", () => {
  it("persists the agreed pair and reloads it", async () => {
    const { service, view, controller } = await started();
    await controller.recordDecision({
      supplier_strategy: "S2",
      visibility: "V3",
      author: "joint-meeting",
    });
    expect(view.html.get("decision-history")).toContain('data-pair="S2/V3"');
    // a fresh controller sees the recorded decision (server-side persistence)
    const view2 = new MemoryView();
    const controller2 = new DashboardController(service.client(), view2, "?exp=first-run");
    await controller2.start();
    expect(view2.html.get("decision-history")).toContain('data-pair="S2/V3"');
  });

  it("rejects unknown labels inline", async () => {
    const { view, controller } = await started();
    await controller.recordDecision({ supplier_strategy: "S9", visibility: "V3" });
    expect(view.text.get("whatif-error")).toContain("invalid_request");
    expect(view.html.get("decision-history")).not.toContain("S9");
  });
});

describe("backorder overlay", () => {
  it("renders the selected scenarios and lists missing ones", async () => {
    const { view, controller } = await started();
    await controller.showBackorders(["T1-Max-V1-S2", "T1-Max-V4-S2", "nope"]);
    const html = view.html.get("backorder-chart")!;
    expect(html).toContain('data-label="T1-Max-V1-S2"');
    expect(html).toContain('data-label="T1-Max-V4-S2"');
    expect(html).toContain("no trace for: nope");
  });
});
