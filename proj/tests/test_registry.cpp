#include <doctest.h>

#include <random>
#include <sstream>
#include <string>

#include "hpccarbon/errors.hpp"
#include "hpccarbon/registry.hpp"
#include "support/test_util.hpp"

using namespace hpccarbon;

namespace {

Registry load_reg(const std::string& text) {
  std::istringstream in(text);
  return load_registry(in);
}

SystemConfig load_sys(const std::string& text, const Registry& registry) {
  std::istringstream in(text);
  return load_system(in, registry);
}

const std::string kDramText = "format_version 1\n"
                              "[dram d64]\n"
                              "capacity_gb 64\n"
                              "epc_g_per_gb 65\n"
                              "ic_count 20\n";

bool message_contains(const std::exception& err, const std::string& needle) {
  return std::string(err.what()).find(needle) != std::string::npos;
}

} // namespace

TEST_SUITE("registry") {
  TEST_CASE("loads a complete capacity record") {
    const Registry reg = load_reg(kDramText);
    REQUIRE(reg.entries().size() == 1);
    CHECK(reg.contains("d64"));
    CHECK(!reg.contains("d65"));
    const ComponentRecord& record = reg.get("d64");
    CHECK(record.kind == ComponentKind::Dram);
    const auto& spec = std::get<CapacityDeviceSpec>(record.spec);
    CHECK(spec.capacity_gb == 64.0);
    CHECK(spec.epc_g_per_gb == 65.0);
    CHECK(std::get<PerIcPackaging>(spec.packaging).ic_count == 20);
    CHECK(!reg.source_digest().empty());
  }

  TEST_CASE("loads a complete processor record with optional figures") {
    const Registry reg = load_reg("format_version 1\n"
                                  "[gpu g1]\n"
                                  "die_area_cm2 8.0\n"
                                  "fpa_g_per_cm2 300\n"
                                  "gpa_g_per_cm2 200\n"
                                  "mpa_g_per_cm2 100\n"
                                  "ic_count 2\n"
                                  "peak_fp64_tflops 9.7\n"
                                  "release_date 2020-05-01\n");
    const ComponentRecord& record = reg.get("g1");
    const auto& spec = std::get<ProcessorDieSpec>(record.spec);
    CHECK(spec.fab_yield == kDefaultFabYield); // default applies when absent
    CHECK(spec.ic_count == 2);
    CHECK(record.peak_fp64_tflops == 9.7);
    CHECK(!record.bandwidth_gb_per_s.has_value());
    CHECK(record.release_date == "2020-05-01");
  }

  TEST_CASE("rejects duplicates, unknown kinds, and missing fields") {
    CHECK_THROWS_WITH_AS(load_reg(kDramText + "[dram d64]\ncapacity_gb 1\n"
                                              "epc_g_per_gb 1\nic_count 1\n"),
                         "line 6: duplicate component id \"d64\"", ValidationError);
    CHECK_THROWS_WITH_AS(load_reg("format_version 1\n[tpu t]\n"),
                         "line 2: unknown component kind \"tpu\"", ValidationError);
    try {
      load_reg("format_version 1\n[gpu g]\ndie_area_cm2 1\nfpa_g_per_cm2 1\n"
               "gpa_g_per_cm2 1\nmpa_g_per_cm2 1\n");
      FAIL("expected throw");
    } catch (const ValidationError& err) {
      CHECK(message_contains(err, "missing field \"ic_count\""));
    }
  }

  TEST_CASE("rejects fields from the wrong component family") {
    try {
      load_reg("format_version 1\n[gpu g]\ncapacity_gb 64\n");
      FAIL("expected throw");
    } catch (const ValidationError& err) {
      CHECK(message_contains(err, "kind/spec mismatch"));
      CHECK(message_contains(err, "\"capacity_gb\" does not apply to gpu"));
    }
    CHECK_THROWS_AS(load_reg("format_version 1\n[dram d]\ndie_area_cm2 5\n"
                             "capacity_gb 1\nepc_g_per_gb 1\nic_count 1\n"),
                    ValidationError);
  }

  TEST_CASE("capacity packaging needs exactly one mode") {
    const std::string base = "format_version 1\n[ssd s]\ncapacity_gb 100\nepc_g_per_gb 6\n";
    try {
      load_reg(base + "ic_count 2\npackaging_ratio 0.1\n");
      FAIL("expected throw");
    } catch (const ValidationError& err) {
      CHECK(message_contains(err, "exactly one of ic_count or packaging_ratio"));
    }
    CHECK_THROWS_AS(load_reg(base), ValidationError);
  }

  TEST_CASE("range checks carry section context") {
    try {
      load_reg("format_version 1\n[gpu g]\ndie_area_cm2 1\nfpa_g_per_cm2 1\n"
               "gpa_g_per_cm2 1\nmpa_g_per_cm2 1\nic_count 1\nfab_yield 1.5\n");
      FAIL("expected throw");
    } catch (const ValidationError& err) {
      CHECK(std::string(err.what()) == "[gpu g] (line 2): fab_yield must be in (0, 1]");
    }
    CHECK_THROWS_AS(load_reg("format_version 1\n[dram d]\ncapacity_gb 0\n"
                             "epc_g_per_gb 65\nic_count 1\n"),
                    ValidationError);
    CHECK_THROWS_AS(load_reg(kDramText + "release_date 2020-02-30\n"), ValidationError);
  }

  TEST_CASE("UNKNOWN markers yield listed-but-unusable components") {
    const Registry reg = load_reg("format_version 1\n"
                                  "[gpu g]\n"
                                  "die_area_cm2 UNKNOWN\n"
                                  "fpa_g_per_cm2 UNKNOWN\n"
                                  "gpa_g_per_cm2 1\n"
                                  "mpa_g_per_cm2 1\n"
                                  "ic_count 1\n");
    CHECK(reg.contains("g"));
    const RegistryEntry& entry = reg.entries().at("g");
    CHECK(!entry.complete());
    CHECK(entry.kind() == ComponentKind::Gpu);
    const auto& incomplete = std::get<IncompleteComponent>(entry.value);
    CHECK(incomplete.unknown_fields ==
          std::vector<std::string>{"die_area_cm2", "fpa_g_per_cm2"});
    try {
      reg.get("g");
      FAIL("expected throw");
    } catch (const MissingDataError& err) {
      CHECK(std::string(err.what()) ==
            "component \"g\" has UNKNOWN fields: die_area_cm2, fpa_g_per_cm2");
    }
  }

  TEST_CASE("UNKNOWN on an optional figure means absent") {
    const Registry reg = load_reg(kDramText + "bandwidth_gb_per_s UNKNOWN\n");
    const ComponentRecord& record = reg.get("d64"); // still complete
    CHECK(!record.bandwidth_gb_per_s.has_value());
  }

  TEST_CASE("incomplete entries still validate their known fields") {
    CHECK_THROWS_AS(load_reg("format_version 1\n[gpu g]\ndie_area_cm2 UNKNOWN\n"
                             "fpa_g_per_cm2 1\ngpa_g_per_cm2 1\nmpa_g_per_cm2 1\n"
                             "ic_count 1\nfab_yield 0\n"),
                    ValidationError);
  }

  TEST_CASE("serialize/load round-trip preserves the registry") {
    const std::string mixed = kDramText +
                              "\n[gpu g]\n"
                              "die_area_cm2 UNKNOWN\n"
                              "fpa_g_per_cm2 300\n"
                              "gpa_g_per_cm2 200\n"
                              "mpa_g_per_cm2 100\n"
                              "ic_count 2\n"
                              "\n[hdd h]\n"
                              "capacity_gb 16000\n"
                              "epc_g_per_gb 1.33\n"
                              "packaging_ratio 0\n"
                              "bandwidth_gb_per_s 0.25\n";
    const Registry first = load_reg(mixed);
    const std::string canonical = serialize_registry(first);
    const Registry second = load_reg(canonical);
    CHECK(first == second);
    CHECK(serialize_registry(second) == canonical);
  }

  TEST_CASE("property: random registries survive the round-trip") {
    std::mt19937_64 rng(20240615);
    std::uniform_real_distribution<double> positive(0.001, 5000.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<long> ics(0, 64);
    std::uniform_int_distribution<int> kind_index(0, 4);

    for (int trial = 0; trial < 50; ++trial) {
      std::vector<ComponentRecord> records;
      const int n = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < n; ++i) {
        ComponentRecord record;
        record.id = "c" + std::to_string(trial) + "_" + std::to_string(i);
        record.kind = kAllKinds[kind_index(rng)];
        if (is_processor(record.kind)) {
          record.spec = ProcessorDieSpec{positive(rng), positive(rng), positive(rng),
                                         positive(rng), 0.5 + 0.001 * (rng() % 500),
                                         ics(rng)};
        } else if (coin(rng)) {
          record.spec = CapacityDeviceSpec{positive(rng), positive(rng),
                                           PerIcPackaging{ics(rng)}};
        } else {
          record.spec = CapacityDeviceSpec{positive(rng), positive(rng),
                                           RatioPackaging{0.001 * (rng() % 1000)}};
        }
        if (coin(rng)) record.peak_fp64_tflops = positive(rng);
        if (coin(rng)) record.bandwidth_gb_per_s = positive(rng);
        if (coin(rng)) record.active_power_w = positive(rng);
        if (coin(rng)) record.idle_power_w = positive(rng);
        if (coin(rng)) record.release_date = "2021-03-01";
        records.push_back(std::move(record));
      }
      const Registry built = Registry::from_records(records);
      const Registry reloaded = load_reg(serialize_registry(built));
      CHECK(built == reloaded);
    }
  }

  TEST_CASE("from_records rejects duplicates and invalid records") {
    ComponentRecord a;
    a.id = "x";
    a.kind = ComponentKind::Dram;
    a.spec = CapacityDeviceSpec{64, 65, PerIcPackaging{1}};
    CHECK_THROWS_WITH_AS(Registry::from_records({a, a}),
                         "duplicate component id \"x\"", ValidationError);
    ComponentRecord bad = a;
    bad.spec = CapacityDeviceSpec{0, 65, PerIcPackaging{1}};
    CHECK_THROWS_AS(Registry::from_records({bad}), ValidationError);
  }

  TEST_CASE("system files resolve against the registry") {
    const Registry reg = load_reg(kDramText + "\n[gpu g]\ndie_area_cm2 8\n"
                                              "fpa_g_per_cm2 300\ngpa_g_per_cm2 200\n"
                                              "mpa_g_per_cm2 100\nic_count 2\n");
    const SystemConfig config = load_sys("format_version 1\n"
                                         "[system node]\n"
                                         "pue 1.1\n"
                                         "region eu-north\n"
                                         "component g 4\n"
                                         "component d64 8\n",
                                         reg);
    CHECK(config.name == "node");
    CHECK(config.pue == 1.1);
    CHECK(config.region == "eu-north");
    REQUIRE(config.items.size() == 2);
    CHECK(config.items[0].component_id == "g"); // file order kept
    CHECK(config.items[0].count == 4);
    CHECK(config.items[1].component_id == "d64");
    CHECK(config.items[1].count == 8);
  }

  TEST_CASE("system validation failures") {
    const Registry reg = load_reg(kDramText);
    const std::string head = "format_version 1\n[system s]\n";
    CHECK_THROWS_WITH_AS(load_sys(head + "component mi250x 1\n", reg),
                         "line 3: unknown component id \"mi250x\"", ValidationError);
    CHECK_THROWS_WITH_AS(load_sys(head + "component d64 1\ncomponent d64 2\n", reg),
                         "line 4: duplicate component \"d64\" in system",
                         ValidationError);
    CHECK_THROWS_WITH_AS(load_sys(head + "component d64 0\n", reg),
                         "line 3: component count must be >= 1", ValidationError);
    CHECK_THROWS_WITH_AS(load_sys(head + "pue 0.9\ncomponent d64 1\n", reg),
                         "[system s] (line 2): pue must be >= 1", ValidationError);
    CHECK_THROWS_WITH_AS(load_sys(head, reg), "[system s] (line 2): empty system",
                         ValidationError);
    CHECK_THROWS_AS(load_sys(head + "component d64\n", reg), ValidationError);
    CHECK_THROWS_AS(load_sys(head + "component d64 2 extra\n", reg), ValidationError);
    CHECK_THROWS_AS(load_sys("format_version 1\n", reg), ValidationError);
    CHECK_THROWS_AS(load_sys("format_version 1\n[cluster c]\ncomponent d64 1\n", reg),
                    ValidationError);
  }

  TEST_CASE("pue defaults to 1 and counts parse as integers") {
    const Registry reg = load_reg(kDramText);
    const SystemConfig config =
        load_sys("format_version 1\n[system s]\ncomponent d64 1\n", reg);
    CHECK(config.pue == 1.0);
    CHECK(config.region.empty());
    CHECK_THROWS_AS(load_sys("format_version 1\n[system s]\ncomponent d64 1.5\n", reg),
                    ValidationError);
  }

  TEST_CASE("shipped registries load") {
    const Registry starter = load_registry_file(testutil::data_path("components.registry"));
    CHECK(starter.contains("a100"));
    CHECK(starter.contains("dram64"));
    CHECK(!starter.entries().at("a100").complete()); // die params unpublished
    CHECK_THROWS_AS(starter.get("a100"), MissingDataError);
    const auto& dram = starter.get("dram64");
    CHECK(std::get<CapacityDeviceSpec>(dram.spec).capacity_gb == 64.0);

    const Registry demo =
        load_registry_file(testutil::data_path("examples/demo.registry"));
    CHECK(embodied(demo.get("demo-gpu")).total_g == doctest::Approx(6300.0));
    CHECK_THROWS_AS(load_registry_file(testutil::data_path("absent.registry")),
                    ValidationError);
  }
}
