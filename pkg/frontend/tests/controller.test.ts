import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient } from "../src/api.js";
import { AppController } from "../src/state.js";
import {
  FakeFetch,
  jsonResponse,
  ontologyResponse,
  sampleTree,
  schemaNode,
  typologyResponse,
} from "./fake.js";

async function bootedController(fake: FakeFetch) {
  let renders = 0;
  const controller = new AppController(new ApiClient(fake.fetcher), () => {
    renders += 1;
  });
  fake.push(jsonResponse(200, typologyResponse(7)));
  fake.push(jsonResponse(200, ontologyResponse(sampleTree(), 7)));
  await controller.refresh();
  return { controller, renderCount: () => renders };
}

test("merge gesture issues exactly one aggregate op and re-renders the returned revision", async () => {
  const fake = new FakeFetch();
  const { controller, renderCount } = await bootedController(fake);
  controller.select("#0", false);
  controller.select("#1", true);
  const before = renderCount();

  const merged = schemaNode({
    id: "root",
    label: "corpus",
    extension: ["d1", "d2", "d3", "d4"],
    children: [
      schemaNode({ id: "n1", label: "#A", kind: "synthesis", extension: ["d1", "d2", "d3"] }),
      schemaNode({ id: "#2", label: "spese", origin_code: "#2", extension: ["d4"] }),
    ],
  });
  fake.push(jsonResponse(200, { revision: 8, created_id: "n1" }));
  fake.push(jsonResponse(200, ontologyResponse(merged, 8)));

  await controller.mergeSelected("#A");

  const editCalls = fake.callsTo("POST", "/api/edits");
  assert.equal(editCalls.length, 1);
  assert.deepEqual(editCalls[0].body, {
    op: { kind: "aggregate", targets: ["#0", "#1"], new_label: "#A" },
    revision: 7,
  });
  assert.equal(controller.state.revision, 8);
  assert.equal(controller.state.ontology?.root.children[0].label, "#A");
  assert.ok(renderCount() > before, "the tree re-rendered after the merge");
});

test("merge across non-siblings is refused client-side without a request", async () => {
  const fake = new FakeFetch();
  const { controller } = await bootedController(fake);
  controller.select("#0", false);
  controller.select("#2#0", true); // child of #2, not a sibling of #0
  assert.equal(controller.canMerge(), false);
  await controller.mergeSelected("bad");
  assert.equal(fake.callsTo("POST", "/api/edits").length, 0);
  assert.match(controller.state.notice ?? "", /sibling/);
});

test("a stale revision answer triggers a refetch and a retry notice, never a silent merge", async () => {
  const fake = new FakeFetch();
  const { controller } = await bootedController(fake);
  controller.select("#0", false);
  controller.select("#1", true);
  fake.push(jsonResponse(409, { detail: "stale revision 7; current revision is 9" }));
  fake.push(jsonResponse(200, ontologyResponse(sampleTree(), 9)));
  await controller.mergeSelected("#A");
  assert.equal(controller.state.revision, 9);
  assert.match(controller.state.notice ?? "", /retry/);
});

test("rule edit round-trips through PUT and the compiled pane is the server's bytes", async () => {
  const fake = new FakeFetch();
  const { controller } = await bootedController(fake);
  fake.push(jsonResponse(200, { category: "concorso", positives: [], negatives: [], compiled: "", default_program: "", revision: 7 }));
  fake.push(jsonResponse(200, { text: "", revision: 7 }));
  await controller.openRuleEditor("concorso");
  controller.addClause("positives", ["concorso interno"]);
  controller.addClause("negatives", ["render vacante", " seguito concorso "]);

  const compiledText =
    'positive("concorso", IdDoc) :- twogram(IdDoc, "concorso interno", _, _, _).\n' +
    'negative("concorso", IdDoc) :- twogram(IdDoc, "render vacante", _, _, _), twogram(IdDoc, "seguito concorso", _, _, _).\n' +
    'success("concorso", IdDoc, 100, 100, 100) :- positive("concorso", IdDoc), not negative("concorso", IdDoc).\n';
  fake.push(jsonResponse(200, {
    category: "concorso",
    positives: [["concorso interno"]],
    negatives: [["render vacante", "seguito concorso"]],
    compiled: compiledText,
    default_program: "",
    revision: 8,
  }));
  await controller.saveRuleSpec();

  const putCalls = fake.callsTo("PUT", "/api/rules/concorso");
  assert.equal(putCalls.length, 1);
  assert.deepEqual(putCalls[0].body, {
    positives: [["concorso interno"]],
    negatives: [["render vacante", "seguito concorso"]],
    revision: 7,
  });
  assert.equal(controller.state.ruleDraft?.compiled, compiledText);
  assert.equal(controller.state.revision, 8);
});

test("an oversized gram is rejected inline before any request", async () => {
  const fake = new FakeFetch();
  const { controller } = await bootedController(fake);
  fake.push(jsonResponse(200, { category: "c", positives: [], negatives: [], compiled: "", default_program: "", revision: 7 }));
  fake.push(jsonResponse(200, { text: "", revision: 7 }));
  await controller.openRuleEditor("c");
  const callsBefore = fake.calls.length;
  controller.addClause("positives", ["sei parole intere proprio di troppo"]);
  assert.equal(fake.calls.length, callsBefore);
  assert.match(controller.state.ruleDraft?.error ?? "", /more than 5 tokens/);
  assert.deepEqual(controller.state.ruleDraft?.positives, []);
});

test("manual rule rejection shows the diagnostic and preserves the draft", async () => {
  const fake = new FakeFetch();
  const { controller } = await bootedController(fake);
  const badText = 'positive("c", D) :- twogram(D, "a b", _, _';
  fake.push(jsonResponse(400, { detail: "line 1, column 43: expected a term (string, integer, variable, or '_'), found 'end of input'" }));
  await controller.saveManualRules(badText);
  assert.match(controller.state.manualError ?? "", /line 1, column 43/);
  assert.equal(controller.state.manualText, badText);
});

test("classification preview table state equals the /api/classify response", async () => {
  const fake = new FakeFetch();
  const { controller } = await bootedController(fake);
  const counts = { concorso: 2, pensione: 0, spese: 1 };
  fake.push(jsonResponse(200, { revision: 8, counts, total: 3, warnings: [] }));
  await controller.classify();
  assert.deepEqual(controller.state.counts, counts);
  assert.equal(controller.state.revision, 8);
  assert.equal(controller.state.classifying, false);
});

test("classification failure surfaces a message and clears the progress flag", async () => {
  const fake = new FakeFetch();
  const { controller } = await bootedController(fake);
  fake.push(jsonResponse(400, { detail: "no typology yet: run the clustering step first" }));
  await controller.classify();
  assert.match(controller.state.notice ?? "", /classification failed/);
  assert.equal(controller.state.classifying, false);
  assert.equal(controller.state.counts, null);
});

test("undo posts the drafted revision and refetches", async () => {
  const fake = new FakeFetch();
  const { controller } = await bootedController(fake);
  fake.push(jsonResponse(200, { revision: 8, created_id: null }));
  fake.push(jsonResponse(200, ontologyResponse(sampleTree(), 8)));
  await controller.undo();
  assert.deepEqual(fake.callsTo("POST", "/api/edits/undo")[0].body, { revision: 7 });
  assert.equal(controller.state.revision, 8);
});

test("unreachable service raises the blocking banner and retry refetches", async () => {
  const fake = new FakeFetch();
  let renders = 0;
  const controller = new AppController(new ApiClient(fake.fetcher), () => {
    renders += 1;
  });
  await controller.refresh(); // no scripted responses -> rejected fetch
  assert.match(controller.state.banner ?? "", /unreachable/);
  fake.push(jsonResponse(200, typologyResponse(2)));
  fake.push(jsonResponse(200, ontologyResponse(sampleTree(), 2)));
  await controller.refresh();
  assert.equal(controller.state.banner, null);
  assert.equal(controller.state.revision, 2);
});
