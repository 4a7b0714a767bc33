// Runs `report all --seed 42` twice through the CLI and maps the reports onto the acceptance criteria.
// Usage: acceptance <cli> <work_dir>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int exit_code = -1;
    double wall_s = 0;
    std::map<std::string, json> reports;
};

Run run_suite(const std::string& cli, const fs::path& out)
{
    fs::remove_all(out);
    const std::string cmd = "\"" + cli + "\" report all --seed 42 --out \"" + out.string() + "\" > \"" + out.string() + ".log\" 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    Run r;
    r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream idx(out / "index.json");
    if (!idx) return r;
    const json index = json::parse(idx);
    for (const auto& e : index["reports"]) {
        const std::string id = e["id"];
        std::ifstream in(out / (id + ".json"));
        if (in) r.reports[id] = json::parse(in);
    }
    return r;
}

struct Criterion {
    int number;
    std::string title;
    std::vector<std::string> prefixes; // report ids matching any prefix
    std::size_t min_reports;
    double budget_s;
};

bool matches(const std::string& id, const std::vector<std::string>& prefixes)
{
    for (const auto& p : prefixes)
        if (id.rfind(p, 0) == 0) return true;
    return false;
}

std::string worst_metric(const json& rep)
{
    // the first failing tolerance, or the first tolerance when all pass
    std::string first;
    for (auto it = rep["tolerance"].begin(); it != rep["tolerance"].end(); ++it) {
        std::string key = it.key();
        const bool is_min = key.size() > 4 && key.compare(key.size() - 4, 4, ":min") == 0;
        const std::string name = is_min ? key.substr(0, key.size() - 4) : key;
        const json& m = rep["metrics"][name];
        char buf[160];
        if (m.is_null()) std::snprintf(buf, sizeof buf, "%s=nan", name.c_str());
        else std::snprintf(buf, sizeof buf, "%s=%.3g %s %.3g", name.c_str(), m.get<double>(), is_min ? ">=" : "<=", it.value().get<double>());
        const bool ok = !m.is_null() && (is_min ? m.get<double>() >= it.value().get<double>() : m.get<double>() <= it.value().get<double>());
        if (!ok) return buf;
        if (first.empty()) first = buf;
    }
    return first;
}

} // namespace

int main(int argc, char** argv)
{
    setvbuf(stdout, nullptr, _IONBF, 0);
    if (argc != 3) {
        std::fprintf(stderr, "usage: acceptance <cli> <work_dir>\n");
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path work = argv[2];
    fs::create_directories(work);

    const Run a = run_suite(cli, work / "run1");
    const Run b = run_suite(cli, work / "run2");
    std::printf("suite runs: %.1fs (exit %d), %.1fs (exit %d), %zu reports\n", a.wall_s, a.exit_code, b.wall_s, b.exit_code,
                a.reports.size());

    const std::vector<Criterion> criteria = {
        {1, "factorization, both models, a in {0,0.5,1}, k in {1,2}", {"factorization-"}, 12, 180},
        {2, "intertwining identities", {"intertwining-"}, 4, 120},
        {3, "heat kernel masses and semigroup", {"heat-mass", "heat-semigroup-"}, 3, 120},
        {4, "cosh 2r identity", {"cosh2r-identity"}, 1, 10},
        {5, "Green's function versus order-2 kernel", {"green-crosscheck"}, 1, 60},
        {6, "kernel asymptotics", {"kernel-asymptotics-"}, 6, 120},
        {7, "sphere integral hypergeometric profile", {"sphere-hypergeometric-"}, 3, 60},
        {8, "spectral gap", {"spectral-gap-"}, 2, 60},
        {9, "sharp constants and Riesz composition", {"constants", "riesz-composition"}, 2, 10},
        {10, "rearrangement suite", {"rearrange-", "rearranged-kernel-"}, 4, 120},
        {11, "L^2 tail stability", {"l2-tail"}, 1, 60},
        {12, "scalar minorant", {"minorant-"}, 2, 30},
    };

    bool all = true;
    std::set<std::string> used;
    for (const auto& c : criteria) {
        std::size_t count = 0, failed = 0;
        double runtime = 0;
        std::string detail;
        for (const auto& [id, rep] : a.reports) {
            if (!matches(id, c.prefixes)) continue;
            used.insert(id);
            ++count;
            runtime += rep["runtime_s"].get<double>();
            if (!rep["pass"].get<bool>()) {
                ++failed;
                if (detail.empty()) detail = id + ": " + worst_metric(rep) + (rep.contains("error") ? " " + rep["error"].get<std::string>() : "");
            }
        }
        const bool ok = count >= c.min_reports && failed == 0 && runtime <= c.budget_s;
        if (detail.empty() && count < c.min_reports) detail = "only " + std::to_string(count) + " reports";
        if (detail.empty() && runtime > c.budget_s) detail = "over budget";
        std::printf("criterion %2d %s  %s  [%zu reports, %.1fs of %.0fs]%s%s\n", c.number, ok ? "PASS" : "FAIL", c.title.c_str(),
                    count, runtime, c.budget_s, detail.empty() ? "" : "  ", detail.c_str());
        all = all && ok;
    }

    // determinism: identical metrics and params in both runs; each run within 15 minutes
    std::size_t differing = 0;
    std::string first_diff;
    for (const auto& [id, rep] : a.reports) {
        auto it = b.reports.find(id);
        if (it == b.reports.end() || it->second["metrics"] != rep["metrics"] || it->second["params"] != rep["params"] ||
            it->second["pass"] != rep["pass"]) {
            ++differing;
            if (first_diff.empty()) first_diff = id;
        }
    }
    const bool same_ids = a.reports.size() == b.reports.size() && !a.reports.empty();
    const bool det_ok = same_ids && differing == 0 && a.wall_s <= 900 && b.wall_s <= 900;
    std::printf("criterion 13 %s  report all --seed 42 twice gives identical metrics  [%zu reports, %zu differ, %.1fs and %.1fs of 900s]%s%s\n",
                det_ok ? "PASS" : "FAIL", a.reports.size(), differing, a.wall_s, b.wall_s, first_diff.empty() ? "" : "  first: ",
                first_diff.c_str());
    all = all && det_ok;

    for (const auto& [id, rep] : a.reports)
        if (!used.count(id))
            std::printf("supplementary %s  %s\n", rep["pass"].get<bool>() ? "PASS" : "FAIL", id.c_str());
    return all ? 0 : 1;
}
