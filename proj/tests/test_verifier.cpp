#include <doctest.h>

#include <memory>

#include "authtime/errors.hpp"
#include "authtime/rng.hpp"
#include "authtime/transmitter.hpp"
#include "authtime/verifier.hpp"
#include "support/ref_crypto.hpp"
#include "support/tesla_oracle.hpp"

using namespace authtime;

namespace {

constexpr std::uint64_t kInterval = 102'400;

struct World {
  Rng rng;
  std::shared_ptr<const HashChain> chain;
  KeyPair root, ap;
  ApId ap_id = ap_id_from_string("02:00:00:00:00:01");
  ApCertificate cert;
  SignedAnchor anchor0;
  TrustStore store;

  explicit World(std::uint64_t seed = 555, std::uint32_t length = 64, std::uint32_t period = 8)
      : rng(seed) {
    chain = std::make_shared<const HashChain>(HashChain::generate(
        rng.random_bytes32(), length, period,
        {0, static_cast<std::uint64_t>(length + 2) * kInterval}));
    root = ed25519().keypair_from_seed(rng.random_bytes32());
    ap = ed25519().keypair_from_seed(rng.random_bytes32());
    cert = issue_certificate(ap_id, ap.public_key, "root", root.private_key);
    anchor0 = sign_anchor(*chain, 0, ap.private_key, ap_id);
    store = TrustStore(root.public_key);
  }

  BeaconFrame beacon(std::uint32_t n, const Attachments& attachments = {}) const {
    return build_beacon(*chain, n, n * kInterval, 100, ap_id, attachments);
  }

  // On-schedule delivery: reception at the nominal transmission instant.
  VerifyOutcome feed(Verifier& verifier, std::uint32_t n) const {
    const BeaconFrame frame = beacon(n);
    return verifier.on_receive(frame, n * kInterval, n * kInterval);
  }
};

Verifier make_verifier(const World& world, bool pretrust = true) {
  Verifier verifier(VerifierConfig{}, world.store);
  if (pretrust) REQUIRE(verifier.install_anchor(world.anchor0, world.cert));
  return verifier;
}

}  // namespace

TEST_CASE("five on-schedule beacons: four authenticate, counters telescope") {
  World world;
  Verifier verifier = make_verifier(world);
  CHECK(verifier.counters().sig_verifies == 1);
  CHECK(verifier.counters().cert_verifies == 1);

  for (std::uint32_t n = 1; n <= 5; ++n) {
    const VerifyOutcome outcome = world.feed(verifier, n);
    CHECK(outcome.status == VerifyStatus::PendingKey);
    CHECK(outcome.hash_walk_k == 1);
  }

  const auto& log = verifier.frame_log();
  REQUIRE(log.size() == 5);
  for (std::size_t i = 0; i < 4; ++i) CHECK(log[i].status == VerifyStatus::Authenticated);
  CHECK(log[4].status == VerifyStatus::PendingKey);

  CHECK(verifier.counters().hmacs == 4);
  CHECK(verifier.counters().hashes == 5);
  REQUIRE(verifier.authenticated_observations().size() == 4);
  for (std::uint32_t i = 0; i < 4; ++i) {
    CHECK(verifier.authenticated_observations()[i].index == i + 1);
    CHECK(verifier.authenticated_observations()[i].beacon_timestamp_us == (i + 1) * kInterval);
  }
}

TEST_CASE("telescoping: m beacons after joining at distance k cost exactly k + m hashes") {
  World world;
  for (std::uint32_t join : {1u, 5u, 17u}) {
    Verifier verifier = make_verifier(world);
    const std::uint32_t m = 9;
    for (std::uint32_t n = join; n <= join + m; ++n) world.feed(verifier, n);
    CHECK(verifier.authenticated_observations().size() == m);
    CHECK(verifier.counters().hashes == join + m);
    CHECK(verifier.counters().hmacs == m);
  }
}

TEST_CASE("replay of an already-authenticated index is rejected") {
  World world;
  Verifier verifier = make_verifier(world);
  world.feed(verifier, 1);
  world.feed(verifier, 2);  // authenticates beacon 1
  const BeaconFrame replay = world.beacon(1);
  const VerifyOutcome outcome =
      verifier.on_receive(replay, 2 * kInterval + 10, 2 * kInterval + 10);
  CHECK(outcome.status == VerifyStatus::RejectedReplay);
}

TEST_CASE("duplicate of a buffered frame is rejected") {
  World world;
  Verifier verifier = make_verifier(world);
  world.feed(verifier, 1);
  const VerifyOutcome outcome =
      verifier.on_receive(world.beacon(1), kInterval + 5, kInterval + 5);
  CHECK(outcome.status == VerifyStatus::RejectedReplay);
}

TEST_CASE("frames arriving at or past key disclosure are rejected") {
  World world;
  Verifier verifier = make_verifier(world);
  const BeaconFrame frame = world.beacon(3);
  // h_4 is due at TBTT 4; arrival within the safety margin of it must fail.
  const std::uint64_t too_late = 4 * kInterval - 5'000;
  const VerifyOutcome outcome = verifier.on_receive(frame, too_late, too_late);
  CHECK(outcome.status == VerifyStatus::RejectedSecurityCondition);
  CHECK(verifier.counters().hashes == 0);  // rejected before any chain work
}

TEST_CASE("tampered fields are caught by the deferred MAC check") {
  World world;
  Verifier verifier = make_verifier(world);
  BeaconFrame frame = world.beacon(1);
  frame.timestamp_us += 3;  // covered field changed after MAC computation
  verifier.on_receive(frame, kInterval, kInterval);
  world.feed(verifier, 2);
  const auto& log = verifier.frame_log();
  CHECK(log[0].status == VerifyStatus::RejectedMAC);
  CHECK(verifier.authenticated_observations().empty());
}

TEST_CASE("disclosed key off the chain is rejected with the walk counted") {
  World world;
  Verifier verifier = make_verifier(world);
  BeaconFrame frame = world.beacon(2);
  frame.disclosed_key[7] ^= 0x10;
  const VerifyOutcome outcome = verifier.on_receive(frame, 2 * kInterval, 2 * kInterval);
  CHECK(outcome.status == VerifyStatus::RejectedChain);
  CHECK(outcome.hash_walk_k == 2);
  CHECK(verifier.counters().hashes == 2);
}

TEST_CASE("lost beacons cost extra hashes and drop only the missing frames") {
  World world;
  Verifier verifier = make_verifier(world);
  world.feed(verifier, 1);
  world.feed(verifier, 2);
  // beacon 3 lost
  const VerifyOutcome outcome4 = world.feed(verifier, 4);
  CHECK(outcome4.hash_walk_k == 2);
  world.feed(verifier, 5);
  const auto& obs = verifier.authenticated_observations();
  REQUIRE(obs.size() == 3);
  CHECK(obs[0].index == 1);
  CHECK(obs[1].index == 2);
  CHECK(obs[2].index == 4);
  CHECK(verifier.counters().hashes == 1 + 1 + 2 + 1);
  CHECK(verifier.counters().hmacs == 3);
}

TEST_CASE("anchor bootstrap from broadcast attachments") {
  World world(808, 64, 4);
  Verifier verifier(VerifierConfig{}, world.store);
  verifier.pin_certificate(world.cert);

  // Beacons 1..2 arrive with no trust point yet.
  world.feed(verifier, 1);
  world.feed(verifier, 2);
  CHECK(verifier.frame_log()[0].status == VerifyStatus::PendingKey);
  CHECK(verifier.counters().sig_verifies == 0);

  // Beacon 4 carries the anchor at index 4.
  Attachments attachments;
  attachments.anchor = sign_anchor(*world.chain, 4, world.ap.private_key, world.ap_id);
  const BeaconFrame carrier = world.beacon(4, attachments);
  verifier.on_receive(carrier, 4 * kInterval, 4 * kInterval);
  CHECK(verifier.counters().sig_verifies == 1);

  // Pre-anchor frames below the anchor index are unverifiable.
  CHECK(verifier.frame_log()[0].status == VerifyStatus::RejectedSecurityCondition);
  CHECK(verifier.frame_log()[1].status == VerifyStatus::RejectedSecurityCondition);

  // From the anchor on, the chain behaves normally.
  world.feed(verifier, 5);
  world.feed(verifier, 6);
  const auto& obs = verifier.authenticated_observations();
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].index == 4);
  CHECK(obs[1].index == 5);
}

TEST_CASE("a later anchor bridges to the verified frontier and re-anchors trust") {
  World world(909, 64, 4);
  Verifier verifier = make_verifier(world);
  for (std::uint32_t n = 1; n <= 3; ++n) world.feed(verifier, n);

  Attachments attachments;
  attachments.anchor = sign_anchor(*world.chain, 4, world.ap.private_key, world.ap_id);
  const BeaconFrame carrier = world.beacon(4, attachments);
  const VerifyOutcome outcome = verifier.on_receive(carrier, 4 * kInterval, 4 * kInterval);
  CHECK(outcome.status == VerifyStatus::PendingKey);
  // The anchor walk (h_4 -> h_3) resolved beacon 3; the frame's own key walk is zero-length.
  CHECK(verifier.authenticated_observations().size() == 3);
  CHECK(outcome.hash_walk_k == 0);
  CHECK(verifier.counters().sig_verifies == 2);

  world.feed(verifier, 5);
  CHECK(verifier.authenticated_observations().size() == 4);
}

TEST_CASE("anchor signed by an uncertified key rejects the carrying frame") {
  World world;
  Verifier verifier = make_verifier(world);
  Rng rng(4242);
  const KeyPair mallory = ed25519().keypair_from_seed(rng.random_bytes32());
  SignedAnchor forged = sign_anchor(*world.chain, 8, mallory.private_key, world.ap_id);
  Attachments attachments;
  attachments.anchor = forged;
  const BeaconFrame carrier = world.beacon(8, attachments);
  const VerifyOutcome outcome = verifier.on_receive(carrier, 8 * kInterval, 8 * kInterval);
  CHECK(outcome.status == VerifyStatus::RejectedSignature);
}

TEST_CASE("expired chain epoch is rejected") {
  World world;
  Verifier verifier = make_verifier(world);
  const std::uint64_t after_epoch = world.chain->validity().end_us + kInterval;
  const VerifyOutcome outcome = verifier.on_receive(world.beacon(2), 2 * kInterval, after_epoch);
  CHECK(outcome.status == VerifyStatus::RejectedChain);
}

TEST_CASE("legacy client accepts everything, including junk") {
  World world;
  Verifier verifier(VerifierConfig{.legacy_mode = true}, world.store);
  Rng rng(1);
  BeaconFrame junk = world.beacon(1);
  junk.mac = rng.random_bytes32();
  junk.disclosed_key = rng.random_bytes32();
  const VerifyOutcome outcome = verifier.on_receive(junk, kInterval, kInterval);
  CHECK(outcome.status == VerifyStatus::Authenticated);
  CHECK(verifier.authenticated_observations().size() == 1);
  CHECK(verifier.counters().hashes == 0);
}

using testsupport::OracleVerdict;
using testsupport::OracleVerifier;

TEST_CASE("randomized runs agree with the independent oracle") {
  Rng rng(20'240'812);
  int total_frames = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::uint32_t length = 4 + static_cast<std::uint32_t>(rng.uniform_below(61));
    const std::uint32_t period = 1 + static_cast<std::uint32_t>(rng.uniform_below(length));
    World world(1000 + trial, length, period);
    Verifier verifier = make_verifier(world);
    OracleVerifier oracle(0, world.chain->element(0), 0, world.chain->validity().end_us,
                          VerifierConfig{}.safety_margin_us);

    std::uint32_t n = 1;
    while (n < length && total_frames < 30'000) {
      BeaconFrame frame = world.beacon(n);
      std::uint64_t rx = n * kInterval;
      const double dice = rng.uniform();
      if (dice < 0.08) {
        frame.mac[rng.uniform_below(32)] ^= static_cast<std::uint8_t>(1 + rng.uniform_below(255));
      } else if (dice < 0.16) {
        frame.disclosed_key[rng.uniform_below(32)] ^=
            static_cast<std::uint8_t>(1 + rng.uniform_below(255));
      } else if (dice < 0.22) {
        frame.timestamp_us ^= 1ULL << rng.uniform_below(20);
      } else if (dice < 0.28) {
        rx = (n + 1) * kInterval + rng.uniform_below(50'000);  // late delivery
      }

      const VerifyOutcome got = verifier.on_receive(frame, rx, rx);
      const OracleVerdict want = oracle.on_receive(frame, rx);
      CHECK(got.status == want.status);
      CHECK(got.hash_walk_k == want.k);
      ++total_frames;

      if (rng.uniform() < 0.15) n += 1 + static_cast<std::uint32_t>(rng.uniform_below(3));
      ++n;
    }

    // Final per-frame statuses and the primitive counts must agree exactly.
    const auto& log = verifier.frame_log();
    REQUIRE(log.size() == oracle.verdicts.size());
    for (std::size_t i = 0; i < log.size(); ++i) CHECK(log[i].status == oracle.verdicts[i]);
    CHECK(verifier.counters().hashes == oracle.hashes);
    CHECK(verifier.counters().hmacs == oracle.hmacs);
    CHECK(verifier.authenticated_observations().size() == oracle.authenticated);
  }
}
