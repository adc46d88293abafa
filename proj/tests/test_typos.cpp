#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tcs/corpus.hpp"
#include "tcs/error.hpp"
#include "tcs/metrics.hpp"
#include "tcs/text.hpp"
#include "tcs/typos.hpp"

using namespace tcs;

TEST(ApplyTypo, HandComputed) {
  EXPECT_EQ(apply_typo("please", TypoKind::Transposition, 2), "plaese");
  EXPECT_EQ(apply_typo("please", TypoKind::Deletion, 2), "plase");
  EXPECT_EQ(apply_typo("word", TypoKind::Transposition, 1), "wrod");
  EXPECT_EQ(apply_typo("Grüße", TypoKind::Transposition, 2), "Grßüe");
}

TEST(ApplyTypo, OnlyInteriorPositions) {
  EXPECT_THROW(apply_typo("please", TypoKind::Transposition, 0), Error);
  EXPECT_THROW(apply_typo("please", TypoKind::Transposition, 4), Error);
  EXPECT_THROW(apply_typo("please", TypoKind::Deletion, 5), Error);
  EXPECT_NO_THROW(apply_typo("please", TypoKind::Deletion, 4));
}

TEST(InjectTypos, ZeroRateIsIdentity) {
  const std::string t = "Dear customer,\n  the router   needs a reset.";
  EXPECT_EQ(inject_typos(t, {0.0, 42, {TypoKind::Transposition}}), t);
}

TEST(InjectTypos, Deterministic) {
  const TypoSpec spec{0.3, 42, {TypoKind::Transposition, TypoKind::Deletion}};
  for (const auto& e : fixtures::emails()) EXPECT_EQ(inject_typos(e.text, spec), inject_typos(e.text, spec));
}

TEST(InjectTypos, SeedChangesOutput) {
  const std::string t = fixtures::emails().front().text;
  EXPECT_NE(inject_typos(t, {0.5, 1, {TypoKind::Deletion}}), inject_typos(t, {0.5, 2, {TypoKind::Deletion}}));
}

TEST(InjectTypos, SelectsCeilRateTimesEligible) {
  // Eligible: "please", "check", "router", "cable" (4); "the", "and", "a" are too short.
  const std::string t = "please check the router and a cable";
  std::size_t mutated = 0;
  const auto out = inject_typos(t, {0.5, 42, {TypoKind::Deletion}}, mutated);
  EXPECT_EQ(mutated, 2u);
  EXPECT_EQ(residual_errors(out, t).errors, 2u);  // deletions always change the word
  EXPECT_EQ(text_stats(out).chars, text_stats(t).chars - 2);
  inject_typos(t, {0.01, 42, {TypoKind::Deletion}}, mutated);
  EXPECT_EQ(mutated, 1u);
  inject_typos(t, {1.0, 42, {TypoKind::Deletion}}, mutated);
  EXPECT_EQ(mutated, 4u);
}

TEST(InjectTypos, PreservesWhitespaceAndShortWords) {
  const std::string t = "a  bc\tdef\n\nghij  klmno ";
  const auto out = inject_typos(t, {1.0, 9, {TypoKind::Transposition, TypoKind::Deletion}});
  const auto in_spans = text::word_spans(t);
  const auto out_words = text::words(out);
  ASSERT_EQ(out_words.size(), in_spans.size());
  EXPECT_EQ(out_words[0], "a");
  EXPECT_EQ(out_words[1], "bc");
  EXPECT_EQ(out_words[2], "def");
  // Whitespace runs survive byte for byte.
  std::string ws_in, ws_out;
  for (char c : t)
    if (text::is_white_space(static_cast<unsigned char>(c))) ws_in += c;
  for (char c : out)
    if (text::is_white_space(static_cast<unsigned char>(c))) ws_out += c;
  EXPECT_EQ(ws_in, ws_out);
}

TEST(InjectTypos, ResidualErrorsBoundedByMutatedWords) {
  for (const auto& e : fixtures::emails()) {
    std::size_t mutated = 0;
    const auto out = inject_typos(e.text, {0.15, 42, {TypoKind::Transposition, TypoKind::Deletion}}, mutated);
    const auto errors = residual_errors(out, e.text).errors;
    EXPECT_LE(errors, mutated);
    EXPECT_GT(mutated, 0u);
    // Same word count: every edit is a substitution.
    EXPECT_EQ(text_stats(out).words, text_stats(e.text).words);
  }
}

TEST(InjectTypos, InvalidSpec) {
  EXPECT_THROW(inject_typos("text", {1.5, 1, {TypoKind::Deletion}}), Error);
  EXPECT_THROW(inject_typos("text", {0.5, 1, {}}), Error);
}

TEST(TypoKind, Names) {
  EXPECT_EQ(parse_typo_kind("deletion"), TypoKind::Deletion);
  EXPECT_EQ(to_string(TypoKind::Transposition), "transposition");
  EXPECT_THROW(parse_typo_kind("swap"), Error);
}
