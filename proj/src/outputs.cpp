#include "iacr/outputs.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "iacr/errors.hpp"

namespace iacr {
namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

constexpr const char* kHeader = "experiment,group,point_name,point,metric,mean,std_error,trials,seed";

}  // namespace

void write_metric_csv(std::ostream& out, const MetricTable& table) {
  out << "# schema: " << kMetricSchema << '\n' << kHeader << '\n';
  for (const auto& r : table.rows()) {
    out << field(table.experiment()) << ',' << field(r.group) << ',' << field(r.point_name) << ','
        << num(r.point) << ',' << field(r.metric) << ',' << num(r.mean) << ','
        << num(r.std_error) << ',' << r.trials << ',' << r.seed << '\n';
  }
}

MetricTable read_metric_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != std::string("# schema: ") + kMetricSchema) {
    throw InputError("metric CSV: missing or unsupported schema stamp");
  }
  if (!std::getline(in, line) || line != kHeader) throw InputError("metric CSV: bad header");
  MetricTable table;
  bool first = true;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 9) throw InputError("metric CSV: line " + std::to_string(lineno) + " has " +
                                        std::to_string(f.size()) + " fields");
    if (first) {
      table = MetricTable(f[0]);
      first = false;
    }
    try {
      table.add_row({f[1], f[2], std::stod(f[3]), f[4], std::stod(f[5]), std::stod(f[6]),
                     std::stoll(f[7]), std::stoull(f[8])});
    } catch (const std::logic_error&) {
      throw InputError("metric CSV: malformed number on line " + std::to_string(lineno));
    }
  }
  return table;
}

std::string plot_script(const MetricTable& table) {
  const bool db = table.experiment() == "leakage";
  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "# Plots " << table.experiment() << ".csv (schema " << kMetricSchema << ").\n"
     << "import csv\nimport math\nimport os\nfrom collections import defaultdict\n\n"
     << "import matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n"
     << "HERE = os.path.dirname(os.path.abspath(__file__))\n"
     << "NAME = \"" << table.experiment() << "\"\n"
     << "DB = " << (db ? "True" : "False") << "\n\n"
     << "def load():\n"
     << "    with open(os.path.join(HERE, NAME + \".csv\")) as f:\n"
     << "        lines = [l for l in f if not l.startswith(\"#\")]\n"
     << "    series = defaultdict(lambda: defaultdict(list))\n"
     << "    for row in csv.DictReader(lines):\n"
     << "        series[row[\"group\"]][row[\"metric\"]].append(\n"
     << "            (float(row[\"point\"]), float(row[\"mean\"]), float(row[\"std_error\"]), "
        "row[\"point_name\"]))\n"
     << "    return series\n\n"
     << "def main():\n"
     << "    series = load()\n"
     << "    groups = sorted(series)\n"
     << "    fig, axes = plt.subplots(len(groups), 1, figsize=(7, 3.2 * len(groups)), squeeze=False)\n"
     << "    for ax, g in zip(axes[:, 0], groups):\n"
     << "        for metric, pts in sorted(series[g].items()):\n"
     << "            pts.sort()\n"
     << "            x = [p[0] for p in pts]\n"
     << "            y = [p[1] for p in pts]\n"
     << "            e = [p[2] for p in pts]\n"
     << "            if DB:\n"
     << "                y = [10 * math.log10(max(v, 1e-300)) for v in y]\n"
     << "                ax.plot(x, y, marker=\"o\", label=metric)\n"
     << "            else:\n"
     << "                ax.errorbar(x, y, yerr=e, marker=\"o\", capsize=2, label=metric)\n"
     << "            ax.set_xlabel(pts[0][3])\n"
     << "        ax.set_title(g)\n"
     << "        ax.set_ylabel(\"dBW\" if DB else \"value\")\n"
     << "        ax.grid(True, alpha=0.3)\n"
     << "        ax.legend(fontsize=7)\n"
     << "    fig.tight_layout()\n"
     << "    fig.savefig(os.path.join(HERE, NAME + \".png\"), dpi=120)\n\n"
     << "if __name__ == \"__main__\":\n"
     << "    main()\n";
  return py.str();
}

std::vector<std::filesystem::path> emit_outputs(std::span<const MetricTable> tables,
                                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& t : tables) {
    const auto csv = out_dir / (t.experiment() + ".csv");
    const auto py = out_dir / ("plot_" + t.experiment() + ".py");
    {
      std::ofstream f(csv, std::ios::binary | std::ios::trunc);
      if (!f) throw InputError("cannot write " + csv.string());
      write_metric_csv(f, t);
    }
    {
      std::ofstream f(py, std::ios::binary | std::ios::trunc);
      if (!f) throw InputError("cannot write " + py.string());
      f << plot_script(t);
    }
    written.push_back(csv);
    written.push_back(py);
  }
  return written;
}

}  // namespace iacr
