// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "fheprof/errors.hpp"
#include "fheprof/events.hpp"

using namespace fheprof;

TEST(EventCatalog, ThirteenEventsInFourCategories) {
  const auto& names = default_event_names();
  EXPECT_EQ(names.size(), 13u);
  std::map<std::string, std::set<std::string>> by_category;
  for (const auto& n : names) by_category[event_category(n)].insert(n);
  EXPECT_EQ(by_category["core"],
            (std::set<std::string>{"instructions", "cpu-cycles", "branches", "branch-misses"}));
  EXPECT_EQ(by_category["cache"], (std::set<std::string>{"cache-references", "cache-misses",
                                                         "L1-dcache-loads", "L1-icache-load-misses"}));
  EXPECT_EQ(by_category["tlb"],
            (std::set<std::string>{"dTLB-loads", "dTLB-load-misses", "iTLB-load-misses"}));
  EXPECT_EQ(by_category["page-faults"], (std::set<std::string>{"page-faults", "minor-faults"}));
}

TEST(EventSet, DefaultCatalogGroups) {
  const auto set = EventSet::default_catalog();
  EXPECT_EQ(set.group_count(), 4u);
  const auto tight = EventSet::default_catalog(2);
  EXPECT_EQ(tight.group_count(), 2u + 2u + 2u + 1u);
}

TEST(EventSet, GroupsRespectBudgetAndCategories) {
  for (std::size_t budget = 1; budget <= 5; ++budget) {
    const auto set = EventSet::default_catalog(budget);
    std::size_t total = 0;
    for (const auto& g : set.groups) {
      ASSERT_FALSE(g.empty());
      EXPECT_LE(g.size(), budget);
      std::set<std::string> cats;
      for (const auto& e : g) cats.insert(event_category(e));
      EXPECT_EQ(cats.size(), 1u);
      total += g.size();
    }
    EXPECT_EQ(total, set.events.size());
  }
}

TEST(EventSet, DeduplicatesAndRejectsUnknown) {
  const auto set = EventSet::from_names({"instructions", "instructions", "page-faults"});
  EXPECT_EQ(set.events, (std::vector<std::string>{"instructions", "page-faults"}));
  EXPECT_EQ(set.group_count(), 2u);
  EXPECT_THROW(EventSet::from_names({"flux-capacitor"}), ArgumentError);
  EXPECT_THROW(EventSet::from_names({"instructions"}, 0), ArgumentError);
  EXPECT_FALSE(is_known_event("flux-capacitor"));
}

TEST(PerfEventBackend, ProbeEitherWorksOrReportsCapability) {
  try {
    auto backend = PerfEventBackend::probe();
    EXPECT_NE(backend, nullptr);
  } catch (const CapabilityError&) {
    SUCCEED();
  }
}
