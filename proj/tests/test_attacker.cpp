#include <doctest.h>

#include <memory>

#include "authtime/attacker.hpp"
#include "authtime/rng.hpp"
#include "authtime/transmitter.hpp"
#include "authtime/verifier.hpp"

using namespace authtime;

namespace {

constexpr std::uint64_t kInterval = 102'400;

struct World {
  Rng rng{616};
  std::shared_ptr<const HashChain> chain = std::make_shared<const HashChain>(
      HashChain::generate(rng.random_bytes32(), 64, 8, {0, 66 * kInterval}));
  KeyPair root = ed25519().keypair_from_seed(rng.random_bytes32());
  KeyPair ap = ed25519().keypair_from_seed(rng.random_bytes32());
  ApId ap_id = ap_id_from_string("02:00:00:00:00:01");
  ApCertificate cert = issue_certificate(ap_id, ap.public_key, "root", root.private_key);
  SignedAnchor anchor0 = sign_anchor(*chain, 0, ap.private_key, ap_id);
  TrustStore store{root.public_key};

  Verifier verifier(bool legacy = false) {
    VerifierConfig cfg;
    cfg.legacy_mode = legacy;
    Verifier v(cfg, store);
    if (!legacy) REQUIRE(v.install_anchor(anchor0, cert));
    return v;
  }

  BeaconFrame beacon(std::uint32_t n) const {
    return build_beacon(*chain, n, n * kInterval, 100, ap_id);
  }
};

}  // namespace

TEST_CASE("forged beacons are never authenticated by a verifying client") {
  World world;
  Verifier verifier = world.verifier();
  Rng rng(1);

  for (std::uint32_t i = 1; i <= 20; ++i) {
    const std::uint64_t t = i * kInterval + 30'000;
    BeaconFrame forged = forge_beacon(world.ap_id, world.chain->id(), i + 1, t, rng);
    const VerifyOutcome outcome = verifier.on_receive(forged, t, t);
    const bool rejected = outcome.status == VerifyStatus::RejectedChain ||
                          outcome.status == VerifyStatus::RejectedMAC ||
                          outcome.status == VerifyStatus::RejectedReplay ||
                          outcome.status == VerifyStatus::RejectedSecurityCondition;
    CHECK(rejected);
  }
  CHECK(verifier.authenticated_observations().empty());
}

TEST_CASE("a forged frame reusing an old disclosed key still fails") {
  World world;
  Verifier verifier = world.verifier();
  for (std::uint32_t n = 1; n <= 3; ++n) {
    const BeaconFrame b = world.beacon(n);
    verifier.on_receive(b, n * kInterval, n * kInterval);
  }
  // Copy the (public) key disclosed by beacon 2 into a fresh forgery.
  Rng rng(2);
  BeaconFrame forged =
      forge_beacon(world.ap_id, world.chain->id(), 2, 3 * kInterval + 1000, rng);
  forged.disclosed_key = world.chain->element(2);
  const VerifyOutcome outcome =
      verifier.on_receive(forged, 3 * kInterval + 1000, 3 * kInterval + 1000);
  CHECK((outcome.status == VerifyStatus::RejectedReplay ||
         outcome.status == VerifyStatus::RejectedChain));
  CHECK(verifier.authenticated_observations().size() == 2);  // beacons 1 and 2 only
}

TEST_CASE("legacy clients swallow forgeries - the baseline weakness") {
  World world;
  Verifier legacy = world.verifier(true);
  Rng rng(3);
  const BeaconFrame forged = forge_beacon(world.ap_id, world.chain->id(), 5, 123'456, rng);
  CHECK(legacy.on_receive(forged, 123'456, 123'456).status == VerifyStatus::Authenticated);
  CHECK(legacy.authenticated_observations().size() == 1);
}

TEST_CASE("meacon shifts reception times without touching the frames") {
  World world;
  std::vector<TimedFrame> frames;
  for (std::uint32_t n = 1; n <= 5; ++n) frames.push_back({n * kInterval, world.beacon(n)});
  const auto delayed = meacon(frames, 250'000);
  REQUIRE(delayed.size() == frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(delayed[i].tx_time_us == frames[i].tx_time_us + 250'000);
    CHECK(delayed[i].frame == frames[i].frame);
  }
}

TEST_CASE("meacon past the disclosure window is rejected wholesale") {
  World world;
  Verifier victim = world.verifier();
  std::vector<TimedFrame> frames;
  for (std::uint32_t n = 1; n <= 10; ++n) frames.push_back({n * kInterval, world.beacon(n)});
  // Two intervals of delay: every frame arrives after its key disclosure.
  for (const auto& replayed : meacon(frames, 2 * kInterval)) {
    const VerifyOutcome outcome =
        victim.on_receive(replayed.frame, replayed.tx_time_us, replayed.tx_time_us);
    CHECK(outcome.status == VerifyStatus::RejectedSecurityCondition);
  }
  CHECK(victim.authenticated_observations().empty());
}

TEST_CASE("zero-delay meacon duplicates are replays at the original client") {
  World world;
  Verifier client = world.verifier();
  std::vector<TimedFrame> frames;
  for (std::uint32_t n = 1; n <= 5; ++n) frames.push_back({n * kInterval, world.beacon(n)});
  for (const auto& f : frames) client.on_receive(f.frame, f.tx_time_us, f.tx_time_us);
  for (const auto& replayed : meacon(frames, 0)) {
    const VerifyOutcome outcome =
        client.on_receive(replayed.frame, replayed.tx_time_us + 1, replayed.tx_time_us + 1);
    CHECK(outcome.status == VerifyStatus::RejectedReplay);
  }
  CHECK(client.authenticated_observations().size() == 4);
}

TEST_CASE("yesterday's capture replayed into a new epoch fails the validity window") {
  World world;
  Verifier client = world.verifier();
  const std::uint64_t next_epoch = world.chain->validity().end_us + 10 * kInterval;
  const BeaconFrame old_frame = world.beacon(3);
  const VerifyOutcome outcome = client.on_receive(old_frame, next_epoch, next_epoch);
  CHECK(outcome.status == VerifyStatus::RejectedChain);
}

TEST_CASE("attack kind names round-trip") {
  for (AttackKind kind : {AttackKind::None, AttackKind::ForgeBeacon, AttackKind::ReplaySequence,
                          AttackKind::Meacon, AttackKind::RogueAp, AttackKind::ForgeTimeReply}) {
    CHECK(attack_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS(attack_kind_from_string("voodoo"));
}
