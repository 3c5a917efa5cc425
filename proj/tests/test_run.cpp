#include <gtest/gtest.h>

#include <set>

#include "diqsdc/report.hpp"
#include "diqsdc/run.hpp"

using namespace diqsdc;
using namespace diqsdc::protocol;

namespace {

ProtocolConfig quick(std::uint64_t seed, Mode mode = Mode::QSDC) {
  ProtocolConfig c;
  c.d = 1500;
  c.seed = seed;
  c.mode = mode;
  return c;
}

RunReport run(const ProtocolConfig& c, adversary::AdversarySpec adv = {}) {
  return run_protocol(c, complete_inputs(c, {}), adv);
}

}  // namespace

TEST(Run, HonestQsdcDelivers) {
  const auto r = run(quick(1));
  ASSERT_FALSE(r.abort) << r.abort_detail;
  ASSERT_TRUE(r.delivered_message);
  EXPECT_EQ(*r.delivered_message, r.inputs.message);
  EXPECT_EQ(r.receiver_auth->verdict, Verdict::Continue);
  EXPECT_EQ(r.sender_auth->pass_count, r.config.k);
  EXPECT_EQ(r.usage.prepared, r.usage.consumed());
  EXPECT_EQ(r.usage.message, r.config.half_length());
  EXPECT_EQ(r.usage.first_check, r.config.d);
  EXPECT_EQ(r.usage.second_check, r.config.d);
}

TEST(Run, HonestQdDeliversBothMessages) {
  const auto r = run(quick(2, Mode::QD));
  ASSERT_FALSE(r.abort) << r.abort_detail;
  EXPECT_EQ(*r.delivered_message, r.inputs.message);
  EXPECT_EQ(*r.delivered_message_b, r.inputs.message_b);
  EXPECT_EQ(r.integrity_b->verdict, Verdict::Continue);
  EXPECT_EQ(r.usage.prepared, r.usage.consumed());
}

TEST(Run, SuppliedInputsAreKept) {
  auto c = quick(3);
  c.n = 4;
  c.k = 2;
  RunInputs in{bits_from_string("0110"), bits_from_string("1100"), bits_from_string("1011"), {}};
  const auto r = run_protocol(c, in);
  ASSERT_FALSE(r.abort);
  EXPECT_EQ(r.inputs.id_a, in.id_a);
  EXPECT_EQ(*r.delivered_message, in.message);
}

TEST(Run, InvalidConfigOrInputsAbortAsConfigInvalid) {
  auto c = quick(4);
  c.n = 3;
  c.c = 2;
  EXPECT_EQ(run(c).abort, AbortReason::ConfigInvalid);
  auto c2 = quick(4);
  RunInputs bad = complete_inputs(c2, {});
  bad.id_a.pop_back();
  const auto r = run_protocol(c2, bad);
  EXPECT_EQ(r.abort, AbortReason::ConfigInvalid);
  EXPECT_FALSE(r.abort_detail.empty());
  auto c3 = quick(4);
  c3.d = 1;  // too few rounds to fill every correlator cell
  EXPECT_EQ(run(c3).abort, AbortReason::ChshFirstFailed);
}

TEST(Run, SameSeedSameReport) {
  const auto a = report::to_json(run(quick(5))).dump();
  const auto b = report::to_json(run(quick(5))).dump();
  const auto c = report::to_json(run(quick(6))).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Run, AttacksAbortAtTheExpectedStage) {
  const adversary::AdversarySpec ir{adversary::AttackKind::InterceptResend, 0.5,
                                    adversary::AppliesTo::FirstTransmission};
  const auto r1 = run(quick(7), ir);
  EXPECT_EQ(r1.abort, AbortReason::ChshFirstFailed);
  EXPECT_FALSE(r1.chsh_second);
  EXPECT_FALSE(r1.delivered_message);

  const auto r2 = run(quick(8), {adversary::AttackKind::ImpersonateAlice});
  EXPECT_EQ(r2.abort, AbortReason::SenderAuthFailed);
  EXPECT_EQ(r2.receiver_auth->verdict, Verdict::Waived);
  EXPECT_EQ(r2.sender_auth->pass_count + r2.sender_auth->fail_count, r2.config.k);

  const auto r3 = run(quick(9), {adversary::AttackKind::ImpersonateBob});
  EXPECT_EQ(r3.abort, AbortReason::ReceiverAuthFailed);
  EXPECT_EQ(r3.receiver_auth->pass_count + r3.receiver_auth->fail_count, r3.config.k);

  const adversary::AdversarySpec ir2{adversary::AttackKind::InterceptResend, 0.5,
                                     adversary::AppliesTo::SecondTransmission};
  auto lenient = quick(10);
  lenient.auth_tolerance = 1.0;
  EXPECT_EQ(run(lenient, ir2).abort, AbortReason::ChshSecondFailed);
}

TEST(Run, TranscriptIsOrderedAndFollowsProtocolSteps) {
  const auto r = run(quick(11));
  ASSERT_FALSE(r.transcript.empty());
  std::vector<std::string> steps;
  for (std::size_t i = 0; i < r.transcript.size(); ++i) {
    EXPECT_EQ(r.transcript[i].seq, i);
    steps.push_back(r.transcript[i].step);
  }
  const std::vector<std::string> order = {"first-transmission", "first-check", "receiver-auth", "second-check", "sender-auth", "integrity"};
  std::size_t cursor = 0;
  for (const auto& s : steps) {
    while (cursor < order.size() && order[cursor] != s) ++cursor;
    ASSERT_LT(cursor, order.size()) << "step " << s << " out of order";
  }
}

TEST(Report, SchemaCarriesRequiredFields) {
  const auto j = report::to_json(run(quick(12)));
  for (const char* key : {"schema_version", "config", "adversary", "inputs", "chsh_first", "chsh_second",
                          "receiver_auth", "sender_auth", "integrity", "delivered_message", "abort", "pair_usage",
                          "transcript"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["schema_version"], report::kSchemaVersion);
  EXPECT_EQ(j["config"]["seed"], 12u);
  EXPECT_EQ(j["abort"], "none");
  EXPECT_TRUE(j["chsh_first"].contains("s_value"));
  EXPECT_TRUE(j["chsh_first"].contains("rounds_used"));
  EXPECT_EQ(j["delivered_message"], bits_to_hex(run(quick(12)).inputs.message));

  const auto aborted = report::to_json(run(quick(13), {adversary::AttackKind::ImpersonateBob}));
  EXPECT_EQ(aborted["abort"], "ReceiverAuthFailed");
  EXPECT_FALSE(aborted.contains("chsh_second"));
  EXPECT_FALSE(aborted.contains("delivered_message"));
}

TEST(Run, AbortReasonNamesRoundTrip) {
  for (int i = 0; i < 6; ++i) {
    const auto r = static_cast<AbortReason>(i);
    EXPECT_EQ(abort_reason_from_name(name(r)), r);
  }
  EXPECT_FALSE(abort_reason_from_name("bogus"));
}
