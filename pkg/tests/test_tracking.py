"""Tests for following runs at the type level."""

import pytest

from copyless_check.core.process import Name
from copyless_check.frontend.parser import parse, parse_type
from copyless_check.runtime.engine import Configuration
from copyless_check.runtime.scheduler import replay, run
from copyless_check.runtime.tracking import HeapTracker

TRACKED_FIXTURES = [
    "pingpong",
    "choice",
    "polymorphic_echo",
    "stream",
    "shared_service",
]


class TestHeapTracker:
    """Tests for HeapTracker as a run observer."""

    @pytest.mark.parametrize("stem", TRACKED_FIXTURES)
    def test_heaps_stay_typed(self, stem, load_fixture):
        """Test every heap of a well-typed run passes check_heap."""
        start = Configuration.initial(load_fixture(stem).main)
        for seed in range(20):
            tracker = HeapTracker()
            result = run(start, seed, 200, tracker)
            assert len(tracker.verdicts) == result.steps
            assert tracker.first_failure is None, (seed, tracker.first_failure)

    def test_open_records_types(self, pingpong_source):
        """Test both ends are typed after the channel opens."""
        tracker = HeapTracker()
        replay(Configuration.initial(parse(pingpong_source).main), [0], tracker)
        assert tracker.types[Name.linear("a")].body == parse_type("!Ping().?Pong().end")
        assert Name.linear("b") in tracker.types

    def test_send_advances_sender(self, pingpong_source):
        """Test the sender's type moves past the sent message."""
        tracker = HeapTracker()
        replay(Configuration.initial(parse(pingpong_source).main), [0, 0], tracker)
        assert tracker.types[Name.linear("a")].body == parse_type("?Pong().end")

    def test_self_send_fails(self, load_fixture):
        """Test the heap after a self-send is not typed."""
        tracker = HeapTracker()
        run(Configuration.initial(load_fixture("micidiale").main), 0, 200, tracker)
        step, verdict = tracker.first_failure
        assert step == 2
        assert verdict.condition == 2
        assert not verdict.ok

    def test_environments_split_ownership(self, load_fixture):
        """Test an endpoint in flight is typed as unowned."""
        tracker = HeapTracker()
        start = Configuration.initial(load_fixture("polymorphic_echo").main)
        result = replay(start, [0, 0, 0], tracker)
        gamma0, gamma = tracker.environments(result.final)
        assert set(gamma0) == {Name.linear("c")}
        assert Name.linear("c") not in gamma
        assert tracker.verify(result.final).ok
