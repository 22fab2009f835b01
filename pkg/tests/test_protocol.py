import pytest

from secluster import analysis, keying, protocol, udg
from secluster.protocol import (
    AdversaryProfile,
    Kind,
    Placement,
    Rank,
    form_network,
    run_formation,
)
from secluster.udg import Point


def ideal_group():
    """One GD at the origin with three members in range."""
    plan = keying.build_plan(4, 3, 128, seed=7)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(0, 1), Point(-1, 0)], 2.0)
    return g, plan


def two_groups_linear():
    """group0 = {gd 0, os 1}, group1 = {gd 2, os 3} on a line, radius 1."""
    plan = keying.build_plan(4, 1, 128, seed=13)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(2, 0), Point(3, 0)], 1.0)
    return g, plan


def join_leave_network():
    """Two groups of 1 GD + 2 Os; node 5 withheld, in range of both GDs."""
    plan = keying.build_plan(6, 2, 128, seed=3)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(0, 1),
         Point(10, 0), Point(11, 0), Point(5, 0)], 6.0)
    state = form_network(g, plan, Placement.uniform(), seed=1,
                         deployed=[0, 1, 2, 3, 4])
    return state


# -- formation ---------------------------------------------------------------

def test_ideal_single_group():
    g, plan = ideal_group()
    cm = run_formation(g, plan, Placement.uniform(), seed=1)
    assert cm.dominator_set() == {0}
    assert cm.dominator_of == {0: 0, 1: 0, 2: 0, 3: 0}
    assert cm.orphan_events == []
    assert cm.ranks[0] is Rank.GD
    assert all(cm.ranks[i] is Rank.OS for i in (1, 2, 3))


def test_formation_message_sequence():
    g, plan = ideal_group()
    state = form_network(g, plan, Placement.uniform(), seed=1)
    kinds = [(ev.round, ev.envelope.kind) for ev in state.trace]
    assert kinds == [(1, Kind.JOIN_REQ)] * 3 + [(2, Kind.JOIN_APRV)]
    aprv = state.trace[-1]
    assert aprv.envelope.sender == 0
    assert aprv.envelope.key_fingerprint == plan.groups[0].group_key.key_id
    assert aprv.receivers == (1, 2, 3)


def test_plan_graph_size_mismatch_rejected():
    g, _ = ideal_group()
    plan = keying.build_plan(5, 3, 128, seed=7)
    with pytest.raises(ValueError):
        run_formation(g, plan, Placement.uniform(), seed=1)


def test_orphan_adopted_by_foreign_gd():
    # os 3's own GD (2) is far away; foreign gd 0 is adjacent
    plan = keying.build_plan(4, 1, 128, seed=9)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(100, 0), Point(1.5, 0)], 2.0)
    cm = run_formation(g, plan, Placement.uniform(), seed=1)
    assert cm.orphan_events == [protocol.OrphanEvent(3, "ADOPTED", 0)]
    assert cm.dominator_of[3] == 0
    assert cm.ranks[3] is Rank.OS


def test_adopter_is_least_loaded_neighbor_gd():
    # orphan 5 hears gd 0 (one subordinate) and gd 2 (none): 2 must adopt
    plan = keying.build_plan(6, 1, 128, seed=9)
    g = udg.from_positions(
        [Point(0, 0), Point(0.5, 0), Point(1.0, 0), Point(100, 0),
         Point(50, 0), Point(0.7, 0)], 1.0)
    cm = run_formation(g, plan, Placement.uniform(), seed=1)
    adopted = [e for e in cm.orphan_events if e.node == 5]
    assert adopted == [protocol.OrphanEvent(5, "ADOPTED", 2)]


def test_orphan_promoted_when_no_gd_in_range():
    # os 3 only hears os 1, which relays its error flood to the BS
    plan = keying.build_plan(4, 1, 128, seed=9)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(100, 0), Point(2.5, 0)], 2.0)
    cm = run_formation(g, plan, Placement.uniform(), seed=1)
    assert cm.orphan_events == [protocol.OrphanEvent(3, "PROMOTED")]
    assert cm.ranks[3] is Rank.GDOS
    assert cm.dominator_of[3] == 3
    assert 3 in cm.dominator_set()


def test_isolated_orphan_unreachable():
    plan = keying.build_plan(4, 1, 128, seed=9)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(100, 0), Point(500, 500)], 2.0)
    cm = run_formation(g, plan, Placement.uniform(), seed=1)
    assert cm.orphan_events == [protocol.OrphanEvent(3, "UNREACHABLE")]
    assert 3 not in cm.dominator_of
    assert 3 in cm.unreachable()


def test_promoted_node_gets_fresh_group_key():
    plan = keying.build_plan(4, 1, 128, seed=9)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(100, 0), Point(2.5, 0)], 2.0)
    state = form_network(g, plan, Placement.uniform(), seed=1)
    new_gid = max(state.group_dominator)
    assert state.group_dominator[new_gid] == 3
    key = state.group_key[new_gid]
    assert key.key_id in state.rings[3]
    assert state.plan.vault.all_group_keys[new_gid] == key


def test_mediator_recorded_with_adjacency():
    g, plan = two_groups_linear()
    cm = run_formation(g, plan, Placement.uniform(), seed=1)
    # os 1 hears both dominators; os 3 hears only its own
    assert cm.mediators == {1: frozenset({2})}
    for node, foreign in cm.mediators.items():
        own = cm.dominator_of[node]
        assert own in g.neighbors(node)
        for d in foreign:
            assert d in g.neighbors(node)
            assert d != own


def test_error_flood_is_relayed_without_decryption():
    plan = keying.build_plan(4, 1, 128, seed=9)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(100, 0), Point(2.5, 0)], 2.0)
    state = form_network(g, plan, Placement.uniform(), seed=1)
    floods = [ev for ev in state.trace if ev.envelope.kind is Kind.GD_ERR]
    # origin broadcast from 3 plus one relay per reached node
    transmitters = [ev.transmitter for ev in floods]
    assert transmitters[0] == 3
    assert set(transmitters) == {3, 1, 0}
    # the envelope stays the orphan's; relayers never re-encrypt
    assert all(ev.envelope.sender == 3 for ev in floods)
    assert len({ev.envelope.key_fingerprint for ev in floods}) == 1


def test_domination_invariant_on_random_networks():
    for seed in range(10):
        n = 60
        radius = udg.radius_for_expected_degree(n, 300, 300, 6)
        plan = keying.build_plan(n, 5, 128, seed=seed)
        g = udg.generate_uniform(n, 300, 300, radius, seed=seed)
        state = form_network(g, plan, Placement.uniform(), seed=seed)
        report = analysis.formation_validity(state)
        assert report.is_dominating


def test_formation_is_deterministic():
    def run():
        plan = keying.build_plan(50, 4, 128, seed=77)
        radius = udg.radius_for_expected_degree(50, 200, 200, 6)
        g = udg.generate_uniform(50, 200, 200, radius, seed=77)
        state = form_network(g, plan, Placement.uniform(), seed=77)
        trace = [(ev.round, ev.envelope.sender, ev.envelope.kind.value,
                  ev.envelope.key_fingerprint, ev.envelope.payload,
                  ev.receivers) for ev in state.trace]
        return state.cluster_map, trace

    cm1, t1 = run()
    cm2, t2 = run()
    assert cm1.dominator_of == cm2.dominator_of
    assert cm1.ranks == cm2.ranks
    assert cm1.mediators == cm2.mediators
    assert cm1.orphan_events == cm2.orphan_events
    assert t1 == t2


# -- placement ---------------------------------------------------------------

def test_clustered_placement_keeps_members_near_dominator():
    plan = keying.build_plan(40, 3, 128, seed=5)
    g = protocol.deploy_graph(plan, 200, 200, 20, Placement.clustered(5.0),
                              seed=42)
    for grec in plan.groups:
        gp = g.positions[grec.dominator]
        for m in grec.members:
            mp = g.positions[m]
            d = ((gp.x - mp.x) ** 2 + (gp.y - mp.y) ** 2) ** 0.5
            assert d <= 5.0 + 1e-9
            assert m in g.neighbors(grec.dominator)


def test_clustered_placement_stays_in_field():
    plan = keying.build_plan(60, 5, 128, seed=6)
    g = protocol.deploy_graph(plan, 100, 80, 15, Placement.clustered(30.0),
                              seed=1)
    for p in g.positions:
        assert 0 <= p.x <= 100
        assert 0 <= p.y <= 80


def test_clustered_ideal_fill_hits_eq2_count():
    for n, eta, expect in ((100, 9, 10), (60, 5, 10), (101, 9, 11)):
        plan = keying.build_plan(n, eta, 128, seed=n)
        radius = udg.radius_for_expected_degree(n, 500, 500, 6)
        g = protocol.deploy_graph(plan, 500, 500, radius,
                                  Placement.clustered(radius / 4), seed=n)
        cm = run_formation(g, plan, Placement.clustered(radius / 4), seed=n)
        assert len(cm.dominator_set()) == expect
        assert cm.orphan_events == []


def test_single_group_clustered_is_valid_wcds():
    plan = keying.build_plan(8, 7, 128, seed=2)
    g = protocol.deploy_graph(plan, 100, 100, 20, Placement.clustered(10.0),
                              seed=2)
    state = form_network(g, plan, Placement.clustered(10.0), seed=2)
    report = analysis.formation_validity(state)
    assert report.is_wcds


# -- membership dynamics -----------------------------------------------------

def test_join_on_access_list_rotates_group_key():
    state = join_leave_network()
    old = state.group_key[1]
    assert state.join_node(5, 1)
    new = state.group_key[1]
    assert new.key_id != old.key_id
    assert state.cluster_map.rekey_log[-1].cause == "join"
    assert state.cluster_map.dominator_of[5] == 3
    # newcomer got the key under its individual key; old members via old key
    rekey_msgs = [ev for ev in state.trace
                  if ev.envelope.kind in (Kind.REKEY_TO_NEW, Kind.REKEY_BCAST)]
    to_new = [ev for ev in rekey_msgs if ev.receivers == (5,)]
    assert to_new[0].envelope.key_fingerprint == state.individual_key(5).key_id
    bcast = [ev for ev in rekey_msgs if ev.envelope.kind is Kind.REKEY_BCAST]
    assert bcast[0].envelope.key_fingerprint == old.key_id


def test_join_off_access_list_needs_bs_confirmation():
    state = join_leave_network()
    # node 5 is provisioned for group 1 but joins group 0
    assert state.join_node(5, 0)
    assert state.cluster_map.dominator_of[5] == 0
    assert 5 in state.group_members[0]
    kinds = [ev.envelope.kind for ev in state.trace[-5:]]
    assert Kind.ORP_ERR in kinds  # GD escalated the unknown id to the BS


def test_join_unknown_id_denied():
    state = join_leave_network()
    before = len(state.cluster_map.rekey_log)
    assert not state.join_node(99, 0)
    assert len(state.cluster_map.rekey_log) == before
    assert any("99" in msg for msg in state.audit_log)


def test_join_out_of_range_denied():
    plan = keying.build_plan(3, 2, 128, seed=4)
    g = udg.from_positions([Point(0, 0), Point(1, 0), Point(50, 0)], 2.0)
    state = form_network(g, plan, Placement.uniform(), seed=1, deployed=[0, 1])
    assert not state.join_node(2, 0)
    assert any("out of range" in msg for msg in state.audit_log)


def test_leave_rotates_key_and_locks_out_leaver():
    state = join_leave_network()
    old = state.group_key[0]
    assert state.leave_node(1)
    new = state.group_key[0]
    assert new.key_id != old.key_id
    assert 1 not in state.group_members[0]
    assert 1 not in state.cluster_map.dominator_of
    # remaining member 2 was rekeyed under its individual key
    last = [ev for ev in state.trace if ev.envelope.kind is Kind.REKEY_TO_NEW]
    assert last[-1].receivers == (2,)
    assert last[-1].envelope.key_fingerprint == state.individual_key(2).key_id
    # node 1 never receives the new key
    assert new.key_id not in state.rings[1]
    assert new.key_id in state.rings[2]


def test_leaver_cannot_read_subsequent_group_traffic():
    state = join_leave_network()
    leaver_ring = dict(state.rings[1])
    state.leave_node(1)
    # subsequent group-keyed traffic: a join in the same group
    state.join_node(5, 0)
    bcast = [ev for ev in state.trace
             if ev.envelope.kind is Kind.REKEY_BCAST][-1]
    key = leaver_ring.get(bcast.envelope.key_fingerprint)
    assert key is None  # fingerprint unknown to the leaver's old ring


def test_rekey_freshness_over_scenario():
    """Old group-key fingerprints never appear in rounds after their rekey."""
    state = join_leave_network()
    state.join_node(5, 1)
    state.leave_node(5)
    state.join_node(5, 0)
    state.leave_node(1)
    for ev in state.cluster_map.rekey_log:
        later = [te for te in state.trace
                 if te.round > ev.round
                 and te.envelope.key_fingerprint == ev.old_key_id]
        assert later == []


def test_last_member_leaving_still_rotates():
    plan = keying.build_plan(2, 1, 128, seed=8)
    g = udg.from_positions([Point(0, 0), Point(1, 0)], 2.0)
    state = form_network(g, plan, Placement.uniform(), seed=1)
    old = state.group_key[0].key_id
    assert state.leave_node(1)
    assert state.group_key[0].key_id != old
    assert state.group_members[0] == set()


def test_dominator_cannot_leave():
    state = join_leave_network()
    assert not state.leave_node(0)
    assert any("dominator" in msg for msg in state.audit_log)
    assert not state.leave_node(42)  # unknown node: audited no-op
    assert len(state.audit_log) == 2


def test_key_rings_match_grant_log():
    state = join_leave_network()
    state.join_node(5, 1)
    state.leave_node(5)
    state.join_node(5, 0)
    state.leave_node(2)
    for node, ring in state.rings.items():
        granted = {kid for (who, kid, _) in state.grant_log if who == node}
        assert set(ring) == granted
    # no Os ring ever contains another sensor's individual key
    individual = {state.individual_key(m).key_id: m
                  for g in state.plan.groups for m in g.members}
    for node, ring in state.rings.items():
        if state.cluster_map.ranks.get(node) in (Rank.GD, Rank.GDOS):
            continue
        for kid in ring:
            owner = individual.get(kid)
            assert owner is None or owner == node


def test_vault_is_superset_of_all_rings_after_rekeys():
    state = join_leave_network()
    state.join_node(5, 1)
    state.leave_node(5)
    state.join_node(5, 0)
    vault = state.plan.vault
    for ring in state.rings.values():
        for kid in ring:
            assert vault.holds(kid)
    for gid, key in state.group_key.items():
        assert vault.all_group_keys[gid] == key


def test_uniform_worst_case_promotes_every_os():
    # no Os can hear any GD, but the Os pair stays connected: both promoted,
    # so the dominator set degenerates to all n nodes
    plan = keying.build_plan(4, 1, 128, seed=19)
    g = udg.from_positions(
        [Point(100, 0), Point(0, 0), Point(200, 0), Point(1, 0)], 2.0)
    cm = run_formation(g, plan, Placement.uniform(), seed=1)
    assert {e.resolution for e in cm.orphan_events} == {"PROMOTED"}
    assert cm.dominator_set() == {0, 1, 2, 3}


# -- adversary ---------------------------------------------------------------

def test_outsider_is_fully_contained():
    state = join_leave_network()
    state.join_node(5, 1)
    state.leave_node(5)
    report = state.simulate_adversary(AdversaryProfile.outsider(), 1000, seed=3)
    assert report.admissions == 0
    assert report.decrypted == []


def test_compromised_os_reads_exactly_its_own_links():
    state = join_leave_network()
    state.join_node(5, 0)
    state.leave_node(5)
    profile = AdversaryProfile.compromised_os(state, 1)
    report = state.simulate_adversary(profile, 300, seed=4)
    assert report.admissions == 0
    grants = {kid for (who, kid, _) in state.grant_log if who == 1}
    trace_fps = {ev.envelope.key_fingerprint for ev in state.trace}
    assert {fp for (_, _, fp) in report.decrypted} == grants & trace_fps
    # every readable envelope sits in node 1's own group
    assert {grp for (_, grp, _) in report.decrypted} == {0}


def test_compromised_os_tracks_its_groups_rekeys_only():
    state = join_leave_network()
    profile = AdversaryProfile.compromised_os(state, 4)  # member of group 1
    state.join_node(5, 1)   # group 1 rekeys; node 4 (and the adversary) follow
    state.leave_node(1)     # group 0 rekeys; adversary must not follow
    report = state.simulate_adversary(profile, 50, seed=5)
    groups = {grp for (_, grp, _) in report.decrypted}
    assert groups == {1}
    assert state.group_key[1].key_id in {fp for (_, _, fp) in report.decrypted} \
        or state.group_key[1].key_id not in \
        {ev.envelope.key_fingerprint for ev in state.trace}


def test_compromised_gd_after_revocation_reads_nothing_new():
    # three groups of 1 GD + 2 Os; node 8 withheld and adjacent to gd 0
    plan = keying.build_plan(9, 2, 128, seed=31)
    g = udg.from_positions(
        [Point(0, 0), Point(1, 0), Point(0, 1),
         Point(10, 0), Point(11, 0), Point(10, 1),
         Point(20, 0), Point(21, 0), Point(1, 1)], 3.0)
    state = form_network(g, plan, Placement.uniform(), seed=1,
                         deployed=range(8))
    profile = AdversaryProfile.compromised_gd(state, 1)
    state.revoke_group(1)
    cut = len(state.trace)
    # the rest of the network keeps operating
    state.join_node(8, 0)
    state.leave_node(1)
    state.leave_node(7)
    report = state.simulate_adversary(profile, 100, seed=6)
    assert report.admissions == 0
    post_fps = {ev.envelope.key_fingerprint for ev in state.trace[cut:]}
    assert {fp for (_, _, fp) in report.decrypted} & post_fps == set()
    assert all(grp == 1 for (_, grp, _) in report.decrypted)


def test_revoked_member_cannot_rejoin():
    state = join_leave_network()
    state.revoke_group(1)
    assert not state.join_node(4, 0)  # node 4's key material is revoked


def test_attack_report_is_deterministic():
    def run():
        state = join_leave_network()
        state.join_node(5, 1)
        report = state.simulate_adversary(AdversaryProfile.outsider(), 200, seed=9)
        return report.attempts, report.decrypted

    assert run() == run()


# -- exports -----------------------------------------------------------------

def test_clustermap_csv_schema(tmp_path):
    g, plan = two_groups_linear()
    state = form_network(g, plan, Placement.uniform(), seed=1)
    path = tmp_path / "cm.csv"
    protocol.write_clustermap_csv(state.cluster_map, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "node_id,rank,dominator,is_mediator,orphan_resolution"
    assert lines[1] == "0,GD,0,false,"
    assert lines[2] == "1,Os,0,true,"
    assert len(lines) == 5


def test_trace_csv_schema(tmp_path):
    g, plan = ideal_group()
    state = form_network(g, plan, Placement.uniform(), seed=1)
    path = tmp_path / "trace.csv"
    protocol.write_trace_csv(state.trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "round,sender,kind,key_fingerprint,receivers"
    first = lines[1].split(",")
    assert first[0] == "1"
    assert first[2] == "JOIN_REQ"
    assert first[4] == "0;2;3"
