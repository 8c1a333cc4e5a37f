#include <benchmark/benchmark.h>

#include <memory>

#include "authtime/beacon.hpp"
#include "authtime/crypto.hpp"
#include "authtime/hash_chain.hpp"
#include "authtime/rng.hpp"
#include "authtime/transmitter.hpp"
#include "authtime/verifier.hpp"

using namespace authtime;

namespace {

struct Setup {
  Rng rng{1};
  Digest32 seed = rng.random_bytes32();
  KeyPair root = ed25519().keypair_from_seed(rng.random_bytes32());
  KeyPair ap = ed25519().keypair_from_seed(rng.random_bytes32());
  ApId ap_id = ap_id_from_string("02:00:00:00:00:01");
};

void BM_ChainGenerate(benchmark::State& state) {
  Setup s;
  const auto length = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        HashChain::generate(s.seed, length, length, {0, length * 102'400ULL}));
  }
  state.SetItemsProcessed(state.iterations() * length);
}
BENCHMARK(BM_ChainGenerate)->Arg(1000)->Arg(10'000)->Arg(100'000);

void BM_VerifyElementWalk(benchmark::State& state) {
  Setup s;
  const auto k = static_cast<std::uint32_t>(state.range(0));
  const HashChain chain = HashChain::generate(s.seed, k + 1, 1, {0, 1});
  const Digest32 candidate = chain.element(k);
  const Digest32 trusted = chain.element(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_element_against(candidate, k, 0, trusted));
  }
  state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(BM_VerifyElementWalk)->Arg(1)->Arg(599);

void BM_BeaconMac(benchmark::State& state) {
  Setup s;
  const HashChain chain = HashChain::generate(s.seed, 16, 4, {0, 18 * 102'400ULL});
  const BeaconFrame frame = build_beacon(chain, 3, 307'200, 100, s.ap_id);
  const Digest32 key = chain.element(4);
  const Bytes message = mac_message_bytes(frame);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmac_sha256(key, message));
  }
}
BENCHMARK(BM_BeaconMac);

void BM_AnchorSignatureVerify(benchmark::State& state) {
  Setup s;
  const HashChain chain = HashChain::generate(s.seed, 1200, 600, {0, 1202 * 102'400ULL});
  const SignedAnchor anchor = sign_anchor(chain, 600, s.ap.private_key, s.ap_id);
  const Bytes covered = anchor.signed_bytes();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ed25519().verify(s.ap.public_key, covered, anchor.signature));
  }
}
BENCHMARK(BM_AnchorSignatureVerify);

void BM_FrameSerialize(benchmark::State& state) {
  Setup s;
  const HashChain chain = HashChain::generate(s.seed, 16, 4, {0, 18 * 102'400ULL});
  const SignedAnchor anchor = sign_anchor(chain, 4, s.ap.private_key, s.ap_id);
  const BeaconFrame frame = build_beacon(chain, 5, 512'000, 100, s.ap_id, {anchor, {}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(serialize(frame));
  }
}
BENCHMARK(BM_FrameSerialize);

void BM_FrameDeserialize(benchmark::State& state) {
  Setup s;
  const HashChain chain = HashChain::generate(s.seed, 16, 4, {0, 18 * 102'400ULL});
  const BeaconFrame frame = build_beacon(chain, 5, 512'000, 100, s.ap_id);
  const Bytes wire = serialize(frame);
  for (auto _ : state) {
    benchmark::DoNotOptimize(deserialize(wire));
  }
}
BENCHMARK(BM_FrameDeserialize);

// Full receive pipeline at steady state: one chain walk step plus one
// deferred MAC check per beacon.
void BM_VerifierSteadyState(benchmark::State& state) {
  Setup s;
  constexpr std::uint64_t kInterval = 102'400;
  const auto chain = std::make_shared<const HashChain>(
      HashChain::generate(s.seed, 100'000, 600, {0, 100'002 * kInterval}));
  const ApCertificate cert =
      issue_certificate(s.ap_id, s.ap.public_key, "root", s.root.private_key);
  const SignedAnchor anchor0 = sign_anchor(*chain, 0, s.ap.private_key, s.ap_id);

  std::vector<BeaconFrame> frames;
  frames.reserve(90'000);
  for (std::uint32_t n = 1; n < 90'000; ++n) {
    frames.push_back(build_beacon(*chain, n, n * kInterval, 100, s.ap_id));
  }

  Verifier verifier(VerifierConfig{}, TrustStore(s.root.public_key));
  verifier.install_anchor(anchor0, cert);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i >= frames.size()) {
      state.PauseTiming();
      verifier = Verifier(VerifierConfig{}, TrustStore(s.root.public_key));
      verifier.install_anchor(anchor0, cert);
      i = 0;
      state.ResumeTiming();
    }
    const std::uint64_t t = (i + 1) * kInterval;
    benchmark::DoNotOptimize(verifier.on_receive(frames[i], t, t));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_VerifierSteadyState);

}  // namespace

BENCHMARK_MAIN();
