// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "geoscatt/common/error.hpp"
#include "geoscatt/ingest/canonical.hpp"
#include "geoscatt/ingest/dataset.hpp"
#include "geoscatt/ingest/elements.hpp"
#include "support/corpus.hpp"

namespace geoscatt {
namespace {

using testing::corpus_molecules;
using testing::corpus_smiles;
using testing::random_permutation;

ErrorCode parse_error(std::string_view text, std::optional<std::size_t> *pos = nullptr) {
  try {
    parse_smiles(text);
  } catch (const Error &e) {
    if (pos != nullptr) {
      *pos = e.position();
    }
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::kIoError;
}

std::string key_of(std::string_view smiles) {
  return canonical_key(preprocess(parse_smiles(smiles)));
}

TEST(SmilesTest, Methane) {
  const auto g = parse_smiles("C");
  ASSERT_EQ(g.atom_count(), 1);
  EXPECT_TRUE(g.bonds.empty());
  EXPECT_EQ(g.atoms[0].element, 6);
  EXPECT_EQ(g.node_features(0, kFeatTotalHydrogens), 4);
  EXPECT_EQ(g.node_features.cols(), kNodeFeatureCount);
}

TEST(SmilesTest, Benzene) {
  const auto g = parse_smiles("c1ccccc1");
  ASSERT_EQ(g.atom_count(), 6);
  ASSERT_EQ(g.bonds.size(), 6);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_TRUE(g.atoms[i].aromatic);
    EXPECT_EQ(g.node_features(i, kFeatAromatic), 1);
    EXPECT_EQ(g.atoms[i].total_h(), 1);
    EXPECT_EQ(g.node_features(i, kFeatHybridization), kHybridSp2);
    EXPECT_EQ(total_valence(g, i), 4);
    EXPECT_TRUE(g.atoms[i].in_ring);
  }
  int doubles = 0;
  for (const auto &b: g.bonds) {
    EXPECT_EQ(b.order, BondOrder::kAromatic);
    doubles += b.kekule_order == 2;
  }
  EXPECT_EQ(doubles, 3);
}

TEST(SmilesTest, BracketAmmonium) {
  const auto g = parse_smiles("[NH4+]");
  ASSERT_EQ(g.atom_count(), 1);
  EXPECT_EQ(g.atoms[0].element, 7);
  EXPECT_EQ(g.atoms[0].formal_charge, 1);
  EXPECT_EQ(g.atoms[0].explicit_h, 4);
  EXPECT_EQ(g.atoms[0].implicit_h, 0);
  EXPECT_EQ(g.node_features(0, kFeatFormalCharge), 1);
}

TEST(SmilesTest, BracketGrammar) {
  auto g = parse_smiles("[13CH3:7][C@@H](O)[O-]");
  ASSERT_EQ(g.atom_count(), 4);
  EXPECT_EQ(g.atoms[0].explicit_h, 3);
  EXPECT_EQ(g.atoms[1].explicit_h, 1);
  EXPECT_EQ(g.atoms[3].formal_charge, -1);
  EXPECT_EQ(parse_smiles("[Fe+++]").atoms[0].formal_charge, 3);
  EXPECT_EQ(parse_smiles("[Fe+3]").atoms[0].formal_charge, 3);
  EXPECT_EQ(parse_smiles("[O--]").atoms[0].formal_charge, -2);
  EXPECT_EQ(parse_smiles("[Cl]").atoms[0].element, 17);
  EXPECT_EQ(parse_smiles("[Co]").atoms[0].element, 27);
}

TEST(SmilesTest, UnmatchedRing) {
  std::optional<std::size_t> pos;
  EXPECT_EQ(parse_error("C1CC", &pos), ErrorCode::kUnmatchedRingBond);
  EXPECT_EQ(pos, 1);
}

TEST(SmilesTest, ErrorsNamePositions) {
  std::optional<std::size_t> pos;
  EXPECT_EQ(parse_error(""), ErrorCode::kEmptyInput);
  EXPECT_EQ(parse_error("CC(C", &pos), ErrorCode::kUnbalancedParenthesis);
  EXPECT_EQ(pos, 2);
  EXPECT_EQ(parse_error("CC)C", &pos), ErrorCode::kUnbalancedParenthesis);
  EXPECT_EQ(pos, 2);
  EXPECT_EQ(parse_error("CC[Xx]", &pos), ErrorCode::kUnknownElement);
  EXPECT_EQ(pos, 3);
  EXPECT_EQ(parse_error("CX", &pos), ErrorCode::kUnknownElement);
  EXPECT_EQ(pos, 1);
  EXPECT_EQ(parse_error("C*"), ErrorCode::kUnknownElement);
  EXPECT_EQ(parse_error("[As]"), ErrorCode::kUnknownElement);
  EXPECT_EQ(parse_error("c1cc[se]c1"), ErrorCode::kUnknownElement);
  EXPECT_EQ(parse_error("C==C", &pos), ErrorCode::kInvalidSyntax);
  EXPECT_EQ(pos, 2);
  EXPECT_EQ(parse_error("C=1CCCCC#1"), ErrorCode::kInvalidSyntax);
  EXPECT_EQ(parse_error("C11"), ErrorCode::kInvalidSyntax);
  EXPECT_EQ(parse_error("C1CC1C1"), ErrorCode::kUnmatchedRingBond);
  EXPECT_EQ(parse_error("CC()C"), ErrorCode::kInvalidSyntax);
  EXPECT_EQ(parse_error("[CH4"), ErrorCode::kInvalidSyntax);
  EXPECT_EQ(parse_error("C C"), ErrorCode::kInvalidSyntax);
  EXPECT_EQ(parse_error("[C+5]"), ErrorCode::kInvalidSyntax);
}

TEST(SmilesTest, RingBondsAndBranches) {
  auto g = parse_smiles("C=1CCCCC1");
  ASSERT_EQ(g.bonds.size(), 6);
  EXPECT_EQ(g.bonds.back().order, BondOrder::kDouble);

  g = parse_smiles("C%10CC%10");
  EXPECT_EQ(g.bonds.size(), 3);

  g = parse_smiles("CC(C)(C)C");
  EXPECT_EQ(g.adjacency()[1].size(), 4);
  EXPECT_EQ(g.atoms[1].total_h(), 0);

  g = parse_smiles("F/C=C/F");
  EXPECT_EQ(g.bonds.size(), 3);
  EXPECT_EQ(g.bonds[1].order, BondOrder::kDouble);
}

TEST(SmilesTest, AromaticHydrogens) {
  auto g = parse_smiles("c1cc[nH]c1");
  EXPECT_EQ(g.atoms[3].total_h(), 1);
  for (int i: { 0, 1, 2, 4 }) {
    EXPECT_EQ(g.atoms[i].total_h(), 1);
  }
  g = parse_smiles("c1ccncc1");
  EXPECT_EQ(g.atoms[3].total_h(), 0);
  g = parse_smiles("c1ccoc1");
  EXPECT_EQ(g.atoms[3].total_h(), 0);
  // Fusion carbons of naphthalene carry no hydrogen.
  g = parse_smiles("c1ccc2ccccc2c1");
  int bare = 0;
  for (const auto &a: g.atoms) {
    bare += a.total_h() == 0;
  }
  EXPECT_EQ(bare, 2);
}

TEST(SmilesTest, BiphenylLinkIsSingle) {
  const auto g = parse_smiles("c1ccc(cc1)c1ccccc1");
  int single = 0;
  for (const auto &b: g.bonds) {
    single += b.order == BondOrder::kSingle;
  }
  EXPECT_EQ(single, 1);
  for (std::size_t i = 0; i < g.atom_count(); ++i) {
    EXPECT_EQ(total_valence(g, i), 4);
  }
}

TEST(SmilesTest, Hybridization) {
  const auto g = parse_smiles("C#CC=CC=C=C");
  EXPECT_EQ(g.node_features(0, kFeatHybridization), kHybridSp);
  EXPECT_EQ(g.node_features(2, kFeatHybridization), kHybridSp2);
  EXPECT_EQ(g.node_features(5, kFeatHybridization), kHybridSp);
  EXPECT_EQ(parse_smiles("CC").node_features(0, kFeatHybridization), kHybridSp3);
}

TEST(SmilesTest, FeatureColumns) {
  const auto g = parse_smiles("O=[N+]([O-])c1ccccc1");
  EXPECT_EQ(g.node_features(1, kFeatAtomicNumber), 7);
  EXPECT_EQ(g.node_features(1, kFeatFormalCharge), 1);
  EXPECT_EQ(g.node_features(1, kFeatTotalValence), 4);
  EXPECT_EQ(g.node_features(2, kFeatTotalValence), 1);
  EXPECT_NEAR(g.node_features(0, kFeatAtomicMass), 15.999, 1e-3);
  EXPECT_EQ(g.node_features(3, kFeatAromatic), 1);
}

// Every atom's Kekule bond sum plus hydrogens is one of the allowed
// valences for its element and charge.
TEST(SmilesTest, CorpusValences) {
  const auto metals = default_metal_list();
  for (const auto &s: corpus_smiles()) {
    const auto g = parse_smiles(s);
    for (std::size_t i = 0; i < g.atom_count(); ++i) {
      const Atom &a = g.atoms[i];
      if (std::find(metals.begin(), metals.end(), a.element) != metals.end() ||
          a.element == 1) {
        continue;
      }
      const auto allowed = charged_valences(a.element, a.formal_charge);
      EXPECT_NE(std::find(allowed.begin(), allowed.end(), total_valence(g, i)),
                allowed.end())
          << s << " atom " << i;
    }
  }
}

TEST(PreprocessTest, SodiumAcetate) {
  const auto g = preprocess(parse_smiles("CC(=O)[O-].[Na+]"));
  EXPECT_EQ(g.atom_count(), 4);
  EXPECT_EQ(g.bonds.size(), 3);
  EXPECT_EQ(canonical_key(g), key_of("CC(=O)[O-]"));
}

TEST(PreprocessTest, ExplicitHydrogens) {
  const auto g = preprocess(parse_smiles("[H]C([H])([H])[H]"));
  ASSERT_EQ(g.atom_count(), 1);
  EXPECT_EQ(g.atoms[0].element, 6);
  EXPECT_EQ(g.atoms[0].total_h(), 4);
  EXPECT_EQ(g.node_features(0, kFeatTotalHydrogens), 4);
  EXPECT_EQ(key_of("[H]OC([H])([H])[H]"), key_of("CO"));
  EXPECT_EQ(key_of("[2H]C([2H])([2H])O"), key_of("CO"));
}

TEST(PreprocessTest, LargestFragment) {
  EXPECT_EQ(key_of("CCO.CCCC.N"), key_of("CCCC"));
  // Equal atoms, the fragment with more bonds wins.
  EXPECT_EQ(key_of("CCCC.C1CC1C"), key_of("C1CC1C"));
  // Full tie: smaller canonical key.
  const std::string a = key_of("CCO"), b = key_of("CCN");
  EXPECT_EQ(key_of("CCO.CCN"), std::min(a, b));
  EXPECT_EQ(key_of("CCN.CCO"), std::min(a, b));
}

TEST(PreprocessTest, NothingLeft) {
  try {
    preprocess(parse_smiles("[Na+].[K+]"));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyAfterPreprocess);
  }
}

TEST(PreprocessTest, IdempotentOnCorpus) {
  for (const auto &s: corpus_smiles()) {
    const auto once = preprocess(parse_smiles(s));
    const auto twice = preprocess(once);
    EXPECT_EQ(canonical_key(once), canonical_key(twice)) << s;
    EXPECT_EQ(once.atom_count(), twice.atom_count()) << s;
    EXPECT_EQ(once.component_count(), 1) << s;
  }
}

TEST(PreprocessTest, SingleFragmentUnchanged) {
  const auto g = parse_smiles("CN1C(=O)CN=C(c2ccccc2)c2cc(Cl)ccc21");
  EXPECT_EQ(preprocess(g).atom_count(), g.atom_count());
}

TEST(CanonicalTest, RelabelingAndElements) {
  EXPECT_EQ(key_of("CCO"), key_of("OCC"));
  EXPECT_NE(key_of("CCO"), key_of("CCN"));
  EXPECT_EQ(key_of("NC(=O)N"), key_of("NC(N)=O"));
  EXPECT_EQ(key_of("c1ccccc1C"), key_of("Cc1ccccc1"));
  EXPECT_NE(key_of("Oc1ccccc1O"), key_of("Oc1cccc(O)c1"));
  EXPECT_NE(key_of("Oc1ccccc1O"), key_of("Oc1ccc(O)cc1"));
  EXPECT_NE(key_of("C1CCCCC1"), key_of("C1CCC1C"));
}

// The corpus holds five deliberate duplicate pairs (methane with explicit
// hydrogens, acetate with and without sodium, two urea spellings, two
// beta-propiolactone spellings, chloride from two salts); every other line
// is a distinct molecule.
TEST(CanonicalTest, CorpusKeysSeparateMolecules) {
  const auto smiles = corpus_smiles();
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto &s: smiles) {
    groups[key_of(s)].push_back(s);
  }
  EXPECT_EQ(groups.size(), smiles.size() - 5);
  EXPECT_EQ(groups[key_of("C")].size(), 2);
  EXPECT_EQ(groups[key_of("CC(=O)[O-]")].size(), 2);
  EXPECT_EQ(groups[key_of("NC(N)=O")].size(), 2);
  EXPECT_EQ(groups[key_of("O=C1OCC1")].size(), 2);
  EXPECT_EQ(groups[key_of("[Cl-]")].size(), 2);
}

TEST(CanonicalTest, BenzenePermutations) {
  const auto benzene = parse_smiles("c1ccccc1");
  Rng rng(11);
  std::set<std::string> keys;
  for (int t = 0; t < 100; ++t) {
    keys.insert(canonical_key(permute_atoms(benzene, random_permutation(6, rng))));
  }
  EXPECT_EQ(keys.size(), 1);
}

TEST(CanonicalTest, CorpusPermutationInvariance) {
  Rng rng(5);
  for (const auto &g: corpus_molecules()) {
    const std::string key = canonical_key(g);
    for (int t = 0; t < 10; ++t) {
      const auto perm = random_permutation(g.atom_count(), rng);
      ASSERT_EQ(canonical_key(permute_atoms(g, perm)), key);
    }
  }
}

TEST(CanonicalTest, WriteParseRoundTrip) {
  Rng rng(9);
  for (const auto &g: corpus_molecules()) {
    const std::string key = canonical_key(g);
    EXPECT_EQ(canonical_key(parse_smiles(write_smiles(g))), key) << key;
    EXPECT_EQ(canonical_key(parse_smiles(key)), key) << key;
    const auto shuffled = permute_atoms(g, random_permutation(g.atom_count(), rng));
    EXPECT_EQ(canonical_key(parse_smiles(write_smiles(shuffled))), key) << key;
  }
}

TEST(CanonicalTest, RanksArePermutation) {
  for (const auto &g: corpus_molecules()) {
    auto ranks = canonical_ranks(g);
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      ASSERT_EQ(ranks[i], static_cast<int>(i));
    }
  }
}

DatasetRecord record(const std::string &key, int label) {
  DatasetRecord r;
  r.canonical_key = key;
  r.label = label;
  return r;
}

std::vector<std::pair<std::string, int>> summary(const std::vector<DatasetRecord> &rs) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto &r: rs) {
    out.emplace_back(r.canonical_key, r.label);
  }
  return out;
}

TEST(DedupTest, ClearEvidence) {
  using V = std::vector<std::pair<std::string, int>>;
  EXPECT_EQ(summary(dedup_clear_evidence({ record("K1", 0), record("K1", 1) })),
            (V { { "K1", 1 } }));
  EXPECT_EQ(summary(dedup_clear_evidence({ record("K1", 0), record("K1", 0) })),
            (V { { "K1", 0 } }));
  EXPECT_EQ(summary(dedup_clear_evidence({ record("K1", 1), record("K2", 0) })),
            (V { { "K1", 1 }, { "K2", 0 } }));
}

TEST(DedupTest, Idempotent) {
  Rng rng(3);
  std::vector<DatasetRecord> rs;
  for (int i = 0; i < 200; ++i) {
    rs.push_back(record("K" + std::to_string(rng.below(40)),
                        static_cast<int>(rng.below(2))));
  }
  const auto once = dedup_clear_evidence(rs);
  EXPECT_EQ(summary(dedup_clear_evidence(once)), summary(once));
  std::map<std::string, int> any_positive;
  for (const auto &r: rs) {
    any_positive[r.canonical_key] |= r.label;
  }
  ASSERT_EQ(once.size(), any_positive.size());
  for (const auto &r: once) {
    EXPECT_EQ(r.label, any_positive[r.canonical_key]);
  }
}

TEST(SplitTest, StratifiedCounts) {
  std::vector<int> labels(100, 0);
  std::fill(labels.begin(), labels.begin() + 60, 1);
  const auto split = split_dataset(labels, 0.2, 7);
  ASSERT_EQ(split.train.size(), 80);
  ASSERT_EQ(split.test.size(), 20);
  int pos = 0;
  for (auto i: split.test) {
    pos += labels[i];
  }
  EXPECT_EQ(pos, 12);

  std::vector<std::size_t> all = split.train;
  all.insert(all.end(), split.test.begin(), split.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    ASSERT_EQ(all[i], i);
  }

  const auto again = split_dataset(labels, 0.2, 7);
  EXPECT_EQ(again.train, split.train);
  EXPECT_EQ(again.test, split.test);
  EXPECT_NE(split_dataset(labels, 0.2, 8).test, split.test);
}

TEST(SplitTest, Degenerate) {
  EXPECT_THROW(split_dataset({ 1, 1, 1, 0 }, 0.2, 1), Error);
  EXPECT_THROW(split_dataset({ 1, 1, 1, 1, 1 }, 0.2, 1), Error);
  EXPECT_NO_THROW(split_dataset({ 1, 1, 0, 0 }, 0.5, 1));
}

TEST(DatasetTest, BuildRecordsKeepsOrder) {
  std::vector<LabeledSmiles> rows;
  int label = 0;
  for (const auto &s: corpus_smiles()) {
    rows.push_back({ s, label });
    label ^= 1;
  }
  rows.push_back({ "C1CC", 1 });
  rows.push_back({ "[Se]", 0 });
  IngestReport serial_report, parallel_report;
  const auto serial = build_records(rows, 1, &serial_report);
  const auto parallel = build_records(rows, 4, &parallel_report);
  ASSERT_EQ(serial.size(), rows.size() - 2);
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].canonical_key, parallel[i].canonical_key);
    EXPECT_EQ(serial[i].smiles_text, rows[i].smiles);
  }
  EXPECT_EQ(serial_report.dropped, parallel_report.dropped);
  EXPECT_EQ(serial_report.dropped.at("UnmatchedRingBond"), 1);
  EXPECT_EQ(serial_report.dropped.at("UnknownElement"), 1);
}

TEST(DatasetTest, ReadAndManifest) {
  const auto dir = std::filesystem::temp_directory_path() / "geoscatt_ingest_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "in.csv");
    out << "id,Label,SMILES\r\n7,1,CCO\r\n8,0,\"c1ccccc1\"\r\n\r\n";
  }
  const auto rows = read_labeled_smiles(dir / "in.csv");
  ASSERT_EQ(rows.size(), 2);
  EXPECT_EQ(rows[0].smiles, "CCO");
  EXPECT_EQ(rows[0].label, 1);
  EXPECT_EQ(rows[1].smiles, "c1ccccc1");
  {
    std::ofstream out(dir / "bad.csv");
    out << "smiles,label\nCCO,2\n";
  }
  EXPECT_THROW(read_labeled_smiles(dir / "bad.csv"), Error);

  const std::vector<ManifestRow> manifest { { key_of("CCO"), 1, "train" },
                                            { key_of("c1ccccc1"), 0, "test" } };
  write_manifest(dir / "manifest.csv", manifest);
  const auto back = read_manifest(dir / "manifest.csv");
  ASSERT_EQ(back.size(), 2);
  EXPECT_EQ(back[1].canonical_key, manifest[1].canonical_key);
  EXPECT_EQ(back[1].split, "test");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace geoscatt
