#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "support/test_util.hpp"

using testutil::contains;
using testutil::data_path;
using testutil::run_cli;

namespace {

std::string q(const std::string& path) { return "\"" + path + "\""; }

std::string demo_registry() { return q(data_path("examples/demo.registry")); }
std::string starter_registry() { return q(data_path("components.registry")); }

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

} // namespace

TEST_SUITE("cli") {
  TEST_CASE("embodied prints a breakdown with an envelope") {
    const auto result = run_cli("embodied demo-gpu --registry " + demo_registry());
    CHECK(result.exit_code == 0);
    CHECK(result.err.empty());
    const std::string envelope = first_line(result.out);
    CHECK(contains(envelope, "# hpc-carbon schema=1 command=embodied inputs=fnv1a64:"));
    CHECK(contains(result.out, "manufacturing_g"));
    CHECK(contains(result.out, "6000.0"));
    CHECK(contains(result.out, "packaging_g"));
    CHECK(contains(result.out, "300.0"));
    CHECK(contains(result.out, "total_g"));
    CHECK(contains(result.out, "6300.0"));
    CHECK(contains(result.out, "kind"));
    CHECK(contains(result.out, "gpu"));
  }

  TEST_CASE("embodied output is byte-identical across runs") {
    const std::string args = "embodied demo-gpu --registry " + demo_registry();
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);

    // --stamp opts into a timestamp line right after the envelope.
    const auto stamped = run_cli(args + " --stamp");
    CHECK(stamped.exit_code == 0);
    const auto second = stamped.out.find('\n') + 1;
    CHECK(stamped.out.substr(second, 12) == "# generated ");
  }

  TEST_CASE("embodied digests depend on the question asked") {
    const auto plain = run_cli("embodied demo-gpu --registry " + demo_registry());
    const auto other = run_cli("embodied demo-dram --registry " + demo_registry());
    const auto flops =
        run_cli("embodied demo-gpu --per-flops --registry " + demo_registry());
    CHECK(first_line(plain.out) != first_line(other.out));
    CHECK(first_line(plain.out) != first_line(flops.out));
  }

  TEST_CASE("embodied CSV format") {
    const auto result =
        run_cli("embodied demo-hdd --format csv --registry " + demo_registry());
    CHECK(result.exit_code == 0);
    CHECK(contains(result.out, "field,value\n"));
    CHECK(contains(result.out, "component,demo-hdd\n"));
    CHECK(contains(result.out, "kind,hdd\n"));
    CHECK(contains(result.out, "total_g,21280.0\n"));
  }

  TEST_CASE("embodied normalizations") {
    const auto flops = run_cli("embodied demo-gpu --per-flops --format csv --registry " +
                               demo_registry());
    CHECK(flops.exit_code == 0);
    CHECK(contains(flops.out, "per_flops_g_per_tflops,649.5\n")); // 6300 / 9.7

    const auto bandwidth = run_cli(
        "embodied demo-hdd --per-bandwidth --format csv --registry " + demo_registry());
    CHECK(bandwidth.exit_code == 0);
    CHECK(contains(bandwidth.out, "per_bandwidth_g_per_gbps,85120.0\n")); // 21280 / 0.25
  }

  TEST_CASE("missing data exits 3 with a clean stdout") {
    // Starter registry lists a100 but its die parameters are UNKNOWN.
    const auto unknown = run_cli("embodied a100 --registry " + starter_registry());
    CHECK(unknown.exit_code == 3);
    CHECK(unknown.out.empty());
    CHECK(contains(unknown.err, "UNKNOWN fields"));
    CHECK(contains(unknown.err, "a100"));

    // demo-cpu has no bandwidth figure to normalize by.
    const auto no_figure = run_cli("embodied demo-cpu --per-bandwidth --registry " +
                                   demo_registry());
    CHECK(no_figure.exit_code == 3);
    CHECK(no_figure.out.empty());
    CHECK(contains(no_figure.err, "bandwidth figure required"));
  }

  TEST_CASE("usage and validation problems exit 2") {
    CHECK(run_cli("embodied nosuch --registry " + demo_registry()).exit_code == 2);
    CHECK(run_cli("embodied demo-gpu --registry /nonexistent.reg").exit_code == 2);
    CHECK(run_cli("embodied").exit_code == 2);           // missing positional
    CHECK(run_cli("brew-coffee").exit_code == 2);        // unknown subcommand
    CHECK(run_cli("").exit_code == 2);                   // subcommand required
    CHECK(run_cli("embodied demo-gpu --format json --registry " + demo_registry())
              .exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("upgrade --help").exit_code == 0);
  }

  TEST_CASE("the registry can come from the environment") {
    const auto bare = run_cli("embodied demo-gpu", "env -u HPC_CARBON_REGISTRY");
    CHECK(bare.exit_code == 2);
    CHECK(contains(bare.err, "no registry given"));

    const auto via_env = run_cli("embodied demo-gpu",
                                 "env HPC_CARBON_REGISTRY=" + demo_registry());
    CHECK(via_env.exit_code == 0);
    CHECK(contains(via_env.out, "6300.0"));

    // An explicit flag wins over the environment.
    const auto flag_wins =
        run_cli("embodied dram64 --format csv --registry " + starter_registry(),
                "env HPC_CARBON_REGISTRY=" + demo_registry());
    CHECK(flag_wins.exit_code == 0);
    CHECK(contains(flag_wins.out, "total_g,7160.0\n"));
  }

  TEST_CASE("system reports totals, splits, and per-kind tables") {
    const auto result = run_cli("system " + q(data_path("examples/demo_node.system")) +
                                " --format csv --registry " + demo_registry());
    CHECK(result.exit_code == 0);
    CHECK(contains(first_line(result.out), "command=system"));
    CHECK(contains(result.out, "system,demo-node\n"));
    CHECK(contains(result.out, "pue,1.1\n"));
    CHECK(contains(result.out, "region,demo-grid\n"));
    CHECK(contains(result.out, "total_g,82480.0\n"));
    CHECK(contains(result.out, "compute_share_pct,30.6\n"));
    CHECK(contains(result.out, "memstorage_share_pct,69.4\n"));
    CHECK(contains(result.out, "component_id,kind,count,embodied_g,share_pct\n"));
    CHECK(contains(result.out, "demo-gpu,gpu,4,25200.0,30.6\n"));
    CHECK(contains(result.out, "demo-dram,dram,8,57280.0,69.4\n"));
    CHECK(contains(result.out, "kind,embodied_g,share_pct\n"));
    CHECK(contains(result.out, "\ngpu,25200.0,30.6\n"));
    CHECK(contains(result.out, "\nssd,0.0,0.0\n"));

    const auto table = run_cli("system " + q(data_path("examples/demo_node.system")) +
                               " --registry " + demo_registry());
    CHECK(table.exit_code == 0);
    CHECK(contains(table.out, "82480.0"));
  }

  TEST_CASE("system validation failures exit 2 before any output") {
    const std::string head = "format_version 1\n[system s]\n";
    const auto check_bad = [&](const std::string& name, const std::string& body,
                               const std::string& message) {
      const std::string path = testutil::write_file(
          "/tmp/hpccarbon_tests/cli_sys_" + name + ".system", head + body);
      const auto result = run_cli("system " + q(path) + " --registry " + demo_registry());
      CHECK(result.exit_code == 2);
      CHECK(result.out.empty());
      CHECK(contains(result.err, message));
    };
    check_bad("empty", "", "empty system");
    check_bad("pue", "pue 0.9\ncomponent demo-gpu 1\n", "pue must be >= 1");
    check_bad("unknown", "component mi250x 1\n", "unknown component id \"mi250x\"");
    check_bad("dup", "component demo-gpu 1\ncomponent demo-gpu 2\n",
              "duplicate component \"demo-gpu\"");
    check_bad("count", "component demo-gpu 0\n", "component count must be >= 1");
    CHECK(run_cli("system /nonexistent.system --registry " + demo_registry())
              .exit_code == 2);
  }

  TEST_CASE("a system touching an UNKNOWN component exits 3") {
    const std::string path = testutil::write_file(
        "/tmp/hpccarbon_tests/cli_sys_unknown_fields.system",
        "format_version 1\n[system s]\ncomponent a100 2\n");
    const auto result = run_cli("system " + q(path) + " --registry " + starter_registry());
    CHECK(result.exit_code == 3);
    CHECK(result.out.empty());
    CHECK(contains(result.err, "UNKNOWN fields"));
  }

  TEST_CASE("intensity stats over the shipped example traces") {
    const std::string args = "intensity " + q(data_path("examples/region_a.csv")) + " " +
                             q(data_path("examples/region_b.csv")) + " --format csv";
    const auto result = run_cli(args);
    CHECK(result.exit_code == 0);
    CHECK(contains(first_line(result.out), "command=intensity"));
    CHECK(contains(result.out, "region_id,count,mean,median,std,cov_pct,min,q1,q3,max\n"));
    CHECK(contains(result.out,
                   "region_a,48,195.0,195.0,69.2,35.5,80.0,137.5,252.5,310.0\n"));
    CHECK(contains(result.out,
                   "region_b,48,170.0,170.0,0.0,0.0,170.0,170.0,170.0,170.0\n"));

    // --stats is the default and adding it changes nothing.
    const auto expl = run_cli(args + " --stats");
    CHECK(expl.out == result.out);
  }

  TEST_CASE("intensity winners over the shipped example traces") {
    const auto result = run_cli("intensity " + q(data_path("examples/region_a.csv")) +
                                " " + q(data_path("examples/region_b.csv")) +
                                " --winners --ref-offset 540 --format csv");
    CHECK(result.exit_code == 0);
    CHECK(contains(result.out, "# reference_utc_offset_minutes 540\n"));
    CHECK(contains(result.out, "# complete_instants 48\n"));
    CHECK(contains(result.out, "hour,region_a,region_b,ties\n"));
    // Cheap solar hours win for region_a between 09:00 and 17:00 local;
    // the exact 170 g tie lands in the ties column at 18:00.
    CHECK(contains(result.out, "\n9,2,0,0\n"));
    CHECK(contains(result.out, "\n17,2,0,0\n"));
    CHECK(contains(result.out, "\n18,0,0,2\n"));
    CHECK(contains(result.out, "\n19,0,2,0\n"));
    CHECK(contains(result.out, "\n0,0,2,0\n"));
    CHECK(contains(result.out, "\n8,0,2,0\n"));
  }

  TEST_CASE("winner analysis needs two regions and a winners flag") {
    const auto lone = run_cli("intensity " + q(data_path("examples/region_a.csv")) +
                              " --winners");
    CHECK(lone.exit_code == 4);
    CHECK(lone.out.empty());
    CHECK(contains(lone.err, "requires at least 2 regions"));

    CHECK(run_cli("intensity " + q(data_path("examples/region_a.csv")) +
                  " --ref-offset 60")
              .exit_code == 2); // --ref-offset needs --winners
    CHECK(run_cli("intensity " + q(data_path("examples/region_a.csv")) +
                  " --stats --winners")
              .exit_code == 2); // mutually exclusive

    const auto dup = run_cli("intensity " + q(data_path("examples/region_a.csv")) + " " +
                             q(data_path("examples/region_a.csv")) + " --winners");
    CHECK(dup.exit_code == 2);
    CHECK(contains(dup.err, "duplicate region id"));
  }

  TEST_CASE("malformed traces exit 2 and name the file") {
    const std::string header = "timestamp,intensity_gco2_per_kwh\n";
    const std::string negative = testutil::write_file(
        "/tmp/hpccarbon_tests/neg.csv", header + "2021-03-01T00:00:00Z,-5\n");
    const auto bad = run_cli("intensity " + q(negative));
    CHECK(bad.exit_code == 2);
    CHECK(contains(bad.err, "neg.csv"));
    CHECK(contains(bad.err, "line 2: intensity must be >= 0"));

    const std::string dup_ts = testutil::write_file(
        "/tmp/hpccarbon_tests/dup.csv",
        header + "2021-03-01T00:00:00Z,1\n2021-03-01T00:00:00Z,2\n");
    CHECK(run_cli("intensity " + q(dup_ts)).exit_code == 2);

    const std::string bad_header = testutil::write_file(
        "/tmp/hpccarbon_tests/head.csv", "time,co2\n2021-03-01T00:00:00Z,1\n");
    CHECK(run_cli("intensity " + q(bad_header)).exit_code == 2);

    CHECK(run_cli("intensity /nonexistent.csv").exit_code == 2);
  }

  TEST_CASE("upgrade runs both default sweeps") {
    const auto result = run_cli("upgrade " + q(data_path("examples/upgrade.scenario")));
    CHECK(result.exit_code == 0);
    CHECK(contains(first_line(result.out), "command=upgrade"));
    CHECK(contains(result.out, "scenario"));
    CHECK(contains(result.out, "demo-upgrade"));
    CHECK(contains(result.out, "work_conserving"));
    CHECK(contains(result.out, "200 g/kWh"));
    CHECK(contains(result.out, "sweep intensity_g_per_kwh"));
    CHECK(contains(result.out, "sweep usage_rate"));

    const auto csv =
        run_cli("upgrade " + q(data_path("examples/upgrade.scenario")) + " --format csv");
    CHECK(csv.exit_code == 0);
    CHECK(contains(csv.out, "intensity_g_per_kwh,break_even_years\n"));
    CHECK(contains(csv.out, "400,0.0801\n"));
    CHECK(contains(csv.out, "200,0.1602\n"));
    CHECK(contains(csv.out, "20,1.6021\n"));
    CHECK(contains(csv.out, "usage_rate,break_even_years\n"));
    CHECK(contains(csv.out, "0.2667,0.2403\n"));
    CHECK(contains(csv.out, "0.4000,0.1602\n"));
    CHECK(contains(csv.out, "0.6000,0.1068\n"));
  }

  TEST_CASE("sweep flags narrow the report and exclude each other") {
    const std::string scenario = q(data_path("examples/upgrade.scenario"));
    const auto only_intensity =
        run_cli("upgrade " + scenario + " --sweep-intensity 100,50 --format csv");
    CHECK(only_intensity.exit_code == 0);
    CHECK(contains(only_intensity.out, "intensity_g_per_kwh,break_even_years\n"));
    CHECK(contains(only_intensity.out, "\n100,0.3204\n")); // 2x the 200 figure
    CHECK(contains(only_intensity.out, "\n50,0.6408\n"));
    CHECK(!contains(only_intensity.out, "usage_rate,break_even_years"));

    const auto only_usage = run_cli("upgrade " + scenario + " --sweep-usage 0.5");
    CHECK(only_usage.exit_code == 0);
    CHECK(!contains(only_usage.out, "intensity_g_per_kwh"));
    CHECK(contains(only_usage.out, "0.5000"));

    CHECK(run_cli("upgrade " + scenario +
                  " --sweep-intensity 100 --sweep-usage 0.5")
              .exit_code == 2);
    CHECK(run_cli("upgrade " + scenario + " --samples-per-year 0").exit_code == 2);
  }

  TEST_CASE("an upgrade that never pays back says so") {
    const std::string path = testutil::write_file(
        "/tmp/hpccarbon_tests/never.scenario",
        "format_version 1\n"
        "[scenario never]\n"
        "new_embodied_g 150000\n"
        "intensity_g_per_kwh 200\n"
        "old_active_power_w 1000\nold_idle_power_w 500\n"
        "new_active_power_w 1000\nnew_idle_power_w 500\n");
    const auto result = run_cli("upgrade " + q(path) + " --format csv");
    CHECK(result.exit_code == 0);
    CHECK(contains(result.out, "400,none within horizon\n"));
    CHECK(contains(result.out, "0.4000,none within horizon\n"));

    const auto table = run_cli("upgrade " + q(path));
    CHECK(contains(table.out, "none within horizon"));
  }

  TEST_CASE("upgrade scenarios can reference trace files relatively") {
    testutil::write_file("/tmp/hpccarbon_tests/updir/grid.csv",
                         "timestamp,intensity_gco2_per_kwh\n"
                         "2021-03-01T00:00:00Z,200\n");
    const std::string path =
        testutil::write_file("/tmp/hpccarbon_tests/updir/trace.scenario",
                             "format_version 1\n"
                             "[scenario traced]\n"
                             "new_embodied_g 1000\n"
                             "intensity_trace_csv grid.csv\n"
                             "old_active_power_w 2000\nold_idle_power_w 2000\n"
                             "new_active_power_w 1000\nnew_idle_power_w 1000\n");
    const auto result = run_cli("upgrade " + q(path));
    CHECK(result.exit_code == 0);
    CHECK(contains(result.out, "trace grid"));
    CHECK(contains(result.out, "sweep usage_rate"));
  }

  TEST_CASE("curve files land in --curves-dir with the documented header") {
    const std::string dir = "/tmp/hpccarbon_tests/curves_out";
    std::filesystem::remove_all(dir);
    const auto result = run_cli("upgrade " + q(data_path("examples/upgrade.scenario")) +
                                " --curves-dir " + q(dir));
    CHECK(result.exit_code == 0);
    for (const std::string stem :
         {"demo-upgrade_intensity_400", "demo-upgrade_intensity_200",
          "demo-upgrade_intensity_20", "demo-upgrade_usage_0.2667",
          "demo-upgrade_usage_0.4", "demo-upgrade_usage_0.6"}) {
      const std::string file = dir + "/" + stem + ".csv";
      REQUIRE_MESSAGE(std::filesystem::exists(file), file);
      std::ifstream in(file);
      std::string header, origin;
      std::getline(in, header);
      std::getline(in, origin);
      CHECK(header == "t_years,cumulative_saving_g");
      CHECK(origin == "0.000000,-150000.0");
    }
  }

  TEST_CASE("broken scenarios exit 2") {
    const std::string path = testutil::write_file(
        "/tmp/hpccarbon_tests/broken.scenario",
        "format_version 1\n[scenario b]\nnew_embodied_g 1\n"
        "intensity_g_per_kwh 200\nmode sideways\n"
        "old_active_power_w 2\nold_idle_power_w 1\n"
        "new_active_power_w 2\nnew_idle_power_w 1\n");
    const auto result = run_cli("upgrade " + q(path));
    CHECK(result.exit_code == 2);
    CHECK(result.out.empty());
    CHECK(contains(result.err, "mode must be work_conserving or constant_active_time"));
    CHECK(run_cli("upgrade /nonexistent.scenario").exit_code == 2);
  }
}
