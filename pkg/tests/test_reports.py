"""Report pipeline: taxonomy, golden renders, citation checks, win rates."""

import uuid
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from arenakit.ranking import Outcome
from arenakit.reports import (
    EpisodeDossier,
    HttpChatClient,
    ModelClientError,
    RefValidationError,
    ReportFormatError,
    StubChatClient,
    StubChatServer,
    SUMMARY_HEADINGS,
    TASK_CATEGORIES,
    UnparseableCategoryError,
    build_full_report,
    categorize_episode,
    categorize_episodes,
    category_winrates,
    render_categorize_prompt,
    render_episode_block,
    render_full_report_prompt,
    render_summary_prompt,
    summarize_report,
    validate_refs,
)

GOLDEN = Path(__file__).parent / "golden"

UUID_A = "16e5bbda-57c1-4e58-a24a-b39ee8142d41"
UUID_B = "7f1f33f2-4a14-4f2e-9c3b-2a6f2f0b5f10"


def dossier(session_id=UUID_A, category="Pick and Place", outcome=Outcome.WIN):
    return EpisodeDossier(session_id=session_id, instruction="put the duck in the mug",
                          category=category, scene="bright desk", result_summary="won",
                          outcome=outcome)


def valid_full_report(refs=(UUID_A,)):
    sections = [
        "1. Policy Overview\nSolid baseline behavior.",
        "2. Comparative Performance\n- Pick and Place: outperformed rivals.",
        "3. Strengths\n- robust grasping " + " ".join(f"<ref>{r}</ref>" for r in refs),
        "4. Weaknesses\n- weak tool use.",
        "5. Instruction Following\nHandles colour qualifiers.",
        "6. Reasoning\nCoarse spatial reasoning.",
        "7. Manipulation Skills\nGood grasping.",
        "8. Robustness to Scene Variations\nHandles clutter.",
        "9. Common Failure Modes\n- freezing mid-task.",
    ]
    return "\n\n".join(sections)


def valid_summary():
    return "\n\n".join(f"{h} fine." for h in SUMMARY_HEADINGS)


class TestCategories:
    def test_exactly_eleven_verbatim(self):
        assert len(TASK_CATEGORIES) == 11
        assert TASK_CATEGORIES == (
            "Pick and Place", "Open / Close", "Move / Slide", "Knock Over / Topple",
            "Cover / Drape / Fold", "Group / Organize / Stack", "Find / Search",
            "Minimal or No Action", "Object Manipulation", "Sorting / Classification",
            "Tool Use")

    def test_dossier_rejects_unknown_category(self):
        with pytest.raises(ValueError):
            dossier(category="ToolUse")


class TestGoldenRenders:
    def test_full_report_prompt_byte_match(self):
        blocks = [
            render_episode_block(1, UUID_A, "put the duck in the mug", "Pick and Place",
                                 "bright desk, mild clutter, objects fully visible",
                                 "win for the policy under review; opponent froze mid-reach"),
            render_episode_block(2, UUID_B, "wipe the whiteboard", "Tool Use",
                                 "dim lab, eraser partially occluded by the arm",
                                 "loss; policy dropped the eraser, opponent finished the wipe"),
        ]
        rendered = render_full_report_prompt("pi-fast-demo", blocks)
        assert rendered == (GOLDEN / "full_report_prompt.txt").read_text()

    def test_summary_prompt_byte_match(self):
        assert render_summary_prompt("FULL REPORT TEXT HERE") == (GOLDEN / "summary_prompt.txt").read_text()

    def test_categorize_prompt_byte_match(self):
        assert render_categorize_prompt("put the duck in the mug") == \
            (GOLDEN / "categorize_prompt.txt").read_text()


class TestCategorize:
    def test_stub_passthrough(self):
        client = StubChatClient(responses=["Tool Use\nbright, cluttered bench"])
        category, scene = categorize_episode([b"frame"], "wipe the board", client)
        assert category == "Tool Use"
        assert scene == "bright, cluttered bench"
        assert client.image_counts == [1]

    def test_non_verbatim_retries_then_fails(self):
        client = StubChatClient(responses=["ToolUse", "ToolUse", "ToolUse"])
        with pytest.raises(UnparseableCategoryError):
            categorize_episode([b"frame"], "wipe the board", client)
        assert len(client.prompts) == 3  # initial try + two retries

    def test_retry_recovers(self):
        client = StubChatClient(responses=["tool use", "Tool Use\nscene"])
        category, _ = categorize_episode([b"frame"], "wipe the board", client)
        assert category == "Tool Use"

    def test_concurrent_categorization_preserves_order(self):
        client = StubChatClient(responses=["Pick and Place\ns1", "Tool Use\ns2", "Find / Search\ns3"])
        out = categorize_episodes(
            [((b"f",), "a"), ((b"f",), "b"), ((b"f",), "c")], client, max_in_flight=1)
        assert [c for c, _ in out] == ["Pick and Place", "Tool Use", "Find / Search"]


class TestValidateRefs:
    def test_known_uuids_pass(self):
        result = validate_refs(f"claim <ref>{UUID_A}</ref> and <ref>{UUID_B}</ref>", [UUID_A, UUID_B])
        assert result.ok
        assert len(result.refs) == 2

    def test_unknown_wellformed_uuid_flagged(self):
        ghost = "00000000-1111-2222-3333-444444444444"
        result = validate_refs(f"<ref>{ghost}</ref>", [UUID_A])
        assert not result.ok
        assert result.violations[0].kind == "unknown"

    def test_malformed_id_flagged_with_position(self):
        text = f"ok <ref>{UUID_A}</ref> bad <ref>16e5bbda</ref>"
        result = validate_refs(text, [UUID_A])
        assert len(result.violations) == 1
        violation = result.violations[0]
        assert violation.kind == "malformed"
        assert text[violation.position:].startswith("<ref>16e5bbda")
        assert "shorten" in violation.describe()

    @settings(max_examples=200)
    @given(st.data())
    def test_sound_and_complete_on_generated_reports(self, data):
        # soundness: every reported violation is a planted bad ref;
        # completeness: every planted bad ref is reported
        rng = data.draw(st.randoms(use_true_random=False))
        known = [str(uuid.UUID(int=rng.getrandbits(128))) for _ in range(3)]
        segments = []
        expected_bad = 0
        for _ in range(data.draw(st.integers(0, 6))):
            kind = data.draw(st.sampled_from(["known", "unknown", "malformed", "text"]))
            if kind == "known":
                segments.append(f"<ref>{rng.choice(known)}</ref>")
            elif kind == "unknown":
                segments.append(f"<ref>{uuid.UUID(int=rng.getrandbits(128))}</ref>")
                expected_bad += 1
            elif kind == "malformed":
                segments.append(f"<ref>{rng.choice(known)[:12]}</ref>")
                expected_bad += 1
            else:
                segments.append(data.draw(st.text(
                    alphabet=st.characters(blacklist_characters="<>"), max_size=30)))
        result = validate_refs(" ".join(segments), known)
        assert len(result.violations) == expected_bad


class TestBuildFullReport:
    def test_valid_stub_report_accepted(self):
        client = StubChatClient(responses=[valid_full_report()])
        report = build_full_report("pi-demo", [dossier()], client)
        assert report.kind == "full"
        assert report.refs == (UUID_A,)
        assert client.prompts[0].startswith("We are evaluating a policy named pi-demo")

    def test_truncated_uuid_rejected_with_rule_text(self):
        bad = valid_full_report().replace(UUID_A, UUID_A[:13])
        client = StubChatClient(responses=[bad])
        with pytest.raises(RefValidationError) as excinfo:
            build_full_report("pi-demo", [dossier()], client)
        assert "shorten, truncate or modify" in str(excinfo.value)

    def test_invented_uuid_rejected_and_all_violations_listed(self):
        ghost1 = "11111111-2222-3333-4444-555555555555"
        ghost2 = "99999999-8888-7777-6666-555555555555"
        bad = valid_full_report(refs=(UUID_A, ghost1, ghost2))
        client = StubChatClient(responses=[bad])
        with pytest.raises(RefValidationError) as excinfo:
            build_full_report("pi-demo", [dossier()], client)
        assert ghost1 in str(excinfo.value) and ghost2 in str(excinfo.value)

    def test_missing_section_rejected(self):
        text = valid_full_report().replace("6. Reasoning", "6. Misc")
        client = StubChatClient(responses=[text])
        with pytest.raises(ReportFormatError):
            build_full_report("pi-demo", [dossier()], client)


class TestSummarizeReport:
    def _full(self):
        return build_full_report("pi-demo", [dossier()],
                                 StubChatClient(responses=[valid_full_report()]))

    def test_all_nine_bullets_accepted(self):
        summary = summarize_report(self._full(), StubChatClient(responses=[valid_summary()]))
        assert summary.kind == "summary"

    def test_missing_bullet_rejected(self):
        text = valid_summary().replace("- Reasoning: fine.", "")
        with pytest.raises(ReportFormatError, match="Reasoning"):
            summarize_report(self._full(), StubChatClient(responses=[text]))

    def test_permuted_headings_rejected(self):
        text = valid_summary().replace("- Strengths: fine.", "TMP")
        text = text.replace("- Weaknesses: fine.", "- Strengths: fine.")
        text = text.replace("TMP", "- Weaknesses: fine.")
        with pytest.raises(ReportFormatError, match="out of order"):
            summarize_report(self._full(), StubChatClient(responses=[text]))


class TestCategoryWinrates:
    def test_rates_and_totals(self):
        dossiers = [dossier(outcome=Outcome.WIN), dossier(outcome=Outcome.WIN),
                    dossier(outcome=Outcome.WIN), dossier(outcome=Outcome.LOSS)]
        rates = category_winrates(dossiers)
        assert rates["Pick and Place"]["win_rate"] == 0.75
        assert rates["Pick and Place"]["count"] == 4

    def test_empty_category_absent(self):
        rates = category_winrates([dossier(category="Tool Use", outcome=Outcome.TIE)])
        assert set(rates) == {"Tool Use"}

    def test_totals_match_input(self):
        dossiers = [dossier(outcome=Outcome.WIN), dossier(category="Tool Use", outcome=Outcome.TIE),
                    dossier(category="Tool Use", outcome=Outcome.LOSS)]
        rates = category_winrates(dossiers)
        assert sum(r["count"] for r in rates.values()) == len(dossiers)
        tool = rates["Tool Use"]
        assert tool["win_rate"] + tool["tie_rate"] + tool["loss_rate"] == pytest.approx(1.0)


class TestHttpChatClient:
    def test_round_trip_through_stub_server(self):
        with StubChatServer(responses=["Tool Use\nscene text"]) as server:
            client = HttpChatClient(endpoint=server.endpoint, model="test-model")
            reply = client.complete("categorize this", images=(b"av",))
            assert reply == "Tool Use\nscene text"
            assert server.requests[0]["model"] == "test-model"
            assert server.requests[0]["images_b64"] == ["YXY="]

    def test_no_endpoint_configured(self, monkeypatch):
        monkeypatch.delenv("ARENAKIT_MODEL_ENDPOINT", raising=False)
        with pytest.raises(ModelClientError):
            HttpChatClient(endpoint=None).complete("x")
