#include "urnkit/csv.hpp"

#include <cstdio>
#include <ostream>

namespace urnkit {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_provenance(std::ostream& out, const std::map<std::string, std::string>& provenance) {
  for (const auto& [key, value] : provenance) {
    out << "# " << key << " = " << value << "\n";
  }
}

void write_path_csv(std::ostream& out, const FinePath& path,
                    const std::map<std::string, std::string>& provenance) {
  write_provenance(out, provenance);
  out << "index,r,g,colour\n";
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    const auto& s = path.states[k];
    out << k << ',' << s.red << ',' << s.green << ',';
    if (k > 0) out << colour_name(path.colours[k - 1]);
    out << '\n';
  }
}

void write_path_csv(std::ostream& out, const CoarsePath& path,
                    const std::map<std::string, std::string>& provenance) {
  write_provenance(out, provenance);
  out << "index,r,g,colour\n";
  for (std::size_t n = 0; n < path.states.size(); ++n) {
    const auto& s = path.states[n];
    out << n << ',' << s.red << ',' << s.green << ",\n";
  }
}

void write_trace_csv(std::ostream& out, const FinePath& path, const DiagnosticsTrace& trace,
                     const std::map<std::string, std::string>& provenance) {
  write_provenance(out, provenance);
  out << "k,r,g,colour,N,M,X,B\n";
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    const auto& s = path.states[k];
    out << k << ',' << s.red << ',' << s.green << ',';
    if (k > 0) out << colour_name(path.colours[k - 1]);
    out << ',' << format_double(trace.imbalance[k]) << ',' << format_double(trace.martingale[k])
        << ',' << trace.min_snapshot[k] << ',';
    if (trace.tail_variance_available) out << format_double(trace.tail_variance[k]);
    out << '\n';
  }
}

void write_distribution_csv(std::ostream& out, const ExactDistribution& dist,
                            const std::map<std::string, std::string>& provenance) {
  write_provenance(out, provenance);
  out << "r,g,probability,fraction\n";
  const std::int64_t total = dist.ball_total();
  for (std::size_t r = 0; r < dist.probs.size(); ++r) {
    out << r << ',' << (total - static_cast<std::int64_t>(r)) << ','
        << format_double(dist.probs[r]) << ',';
    if (dist.arithmetic == Arithmetic::Rational) out << fraction_string(dist.exact[r]);
    out << '\n';
  }
}

}  // namespace urnkit
