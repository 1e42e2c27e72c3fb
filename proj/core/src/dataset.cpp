#include "wola/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "wola/error.hpp"
#include "wola/rng.hpp"

namespace wola {

std::vector<std::int64_t> LabeledDataset::class_counts() const {
    std::vector<std::int64_t> counts(num_classes, 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) throw invalid_input("label out of range");
        ++counts[y];
    }
    return counts;
}

WorkerShard make_shard(LabeledDataset data) {
    WorkerShard shard;
    shard.class_counts = data.class_counts();
    shard.data = std::move(data);
    return shard;
}

void check_simplex(const LabelDistribution& probs, double tol) {
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw invalid_input("distribution has a negative entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
        throw invalid_input("distribution does not sum to 1 within tolerance");
    }
}

LabelDistribution label_distribution(const WorkerShard& shard) {
    if (shard.size() == 0) throw invalid_input("label_distribution: empty shard");
    LabelDistribution probs(shard.class_counts.size());
    const double n = static_cast<double>(shard.size());
    for (std::size_t c = 0; c < probs.size(); ++c) {
        probs[c] = static_cast<double>(shard.class_counts[c]) / n;
    }
    return probs;
}

LabelDistribution global_distribution(const std::vector<WorkerShard>& shards) {
    if (shards.empty()) throw invalid_input("global_distribution: no shards");
    const std::size_t c_count = shards.front().class_counts.size();
    std::vector<std::int64_t> totals(c_count, 0);
    std::int64_t n = 0;
    for (const auto& s : shards) {
        if (s.class_counts.size() != c_count) {
            throw invalid_input("global_distribution: shards disagree on class count");
        }
        for (std::size_t c = 0; c < c_count; ++c) totals[c] += s.class_counts[c];
        n += static_cast<std::int64_t>(s.size());
    }
    if (n == 0) throw invalid_input("global_distribution: all shards empty");
    LabelDistribution probs(c_count);
    for (std::size_t c = 0; c < c_count; ++c) {
        probs[c] = static_cast<double>(totals[c]) / static_cast<double>(n);
    }
    return probs;
}

std::vector<Vec> synthetic_class_means(const SyntheticSpec& spec) {
    const int c_count = spec.num_classes;
    const int d = spec.feature_dim;
    const double sep = spec.class_separation;
    std::vector<Vec> means(c_count, Vec(d, 0.0));

    if (d >= c_count) {
        // Scaled standard basis: ||e_i - e_j|| = sqrt(2), so all pairs sit
        // exactly class_separation apart.
        for (int c = 0; c < c_count; ++c) means[c][c] = sep / std::numbers::sqrt2;
    } else if (d == c_count - 1) {
        // Regular simplex: center the scaled basis of R^C and express it in
        // the Helmert basis of the sum-zero hyperplane.
        std::vector<Vec> centered(c_count, Vec(c_count, -1.0 / c_count));
        for (int c = 0; c < c_count; ++c) centered[c][c] += 1.0;
        for (int c = 0; c < c_count; ++c) {
            for (int k = 1; k < c_count; ++k) {
                // k-th Helmert direction: (1,...,1,-k,0,...)/sqrt(k(k+1))
                double acc = 0.0;
                for (int j = 0; j < k; ++j) acc += centered[c][j];
                acc -= static_cast<double>(k) * centered[c][k];
                means[c][k - 1] =
                    sep / std::numbers::sqrt2 * acc / std::sqrt(static_cast<double>(k) * (k + 1));
            }
        }
    } else if (d >= 2) {
        // Too many classes for an equidistant arrangement: circle with
        // adjacent means class_separation apart.
        const double radius = sep / (2.0 * std::sin(std::numbers::pi / c_count));
        for (int c = 0; c < c_count; ++c) {
            const double angle = 2.0 * std::numbers::pi * c / c_count;
            means[c][0] = radius * std::cos(angle);
            means[c][1] = radius * std::sin(angle);
        }
    } else {
        // One dimension: evenly spaced line.
        for (int c = 0; c < c_count; ++c) means[c][0] = sep * c;
    }
    return means;
}

namespace {

void append_class_samples(LabeledDataset& ds, const Vec& mean, int label,
                          std::int64_t count, Rng& rng) {
    for (std::int64_t k = 0; k < count; ++k) {
        Vec x(mean.size());
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = mean[j] + rng.normal();
        ds.features.push_back(std::move(x));
        ds.labels.push_back(label);
    }
}

}  // namespace

LabeledDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.num_classes < 2) throw invalid_input("generate_synthetic: num_classes must be >= 2");
    if (spec.samples_per_class < 1) {
        throw invalid_input("generate_synthetic: samples_per_class must be >= 1");
    }
    if (spec.feature_dim < 1) throw invalid_input("generate_synthetic: feature_dim must be >= 1");
    if (!(spec.class_separation > 0.0)) {
        throw invalid_input("generate_synthetic: class_separation must be positive");
    }
    const auto means = synthetic_class_means(spec);
    LabeledDataset ds;
    ds.num_classes = spec.num_classes;
    ds.features.reserve(static_cast<std::size_t>(spec.num_classes) * spec.samples_per_class);
    for (int c = 0; c < spec.num_classes; ++c) {
        Rng rng = make_stream(seed, "synthetic", static_cast<std::uint64_t>(c));
        append_class_samples(ds, means[c], c, spec.samples_per_class, rng);
    }
    return ds;
}

LabeledDataset sample_synthetic_by_counts(const SyntheticSpec& spec,
                                          const std::vector<std::int64_t>& count_per_class,
                                          std::uint64_t seed) {
    if (static_cast<int>(count_per_class.size()) != spec.num_classes) {
        throw invalid_input("sample_synthetic_by_counts: count vector length mismatch");
    }
    const auto means = synthetic_class_means(spec);
    LabeledDataset ds;
    ds.num_classes = spec.num_classes;
    for (int c = 0; c < spec.num_classes; ++c) {
        Rng rng = make_stream(seed, "synthetic-extra", static_cast<std::uint64_t>(c));
        append_class_samples(ds, means[c], c, count_per_class[c], rng);
    }
    return ds;
}

std::vector<std::int64_t> proportional_counts(const Vec& probs, std::int64_t total) {
    if (total < 0) throw invalid_input("proportional_counts: negative total");
    double psum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw invalid_input("proportional_counts: negative proportion");
        psum += p;
    }
    if (psum <= 0.0) throw invalid_input("proportional_counts: proportions sum to zero");

    const std::size_t k = probs.size();
    std::vector<std::int64_t> counts(k, 0);
    std::vector<std::pair<double, std::size_t>> remainders(k);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double share = static_cast<double>(total) * probs[i] / psum;
        counts[i] = static_cast<std::int64_t>(std::floor(share));
        assigned += counts[i];
        remainders[i] = {share - std::floor(share), i};
    }
    // Largest remainders win the leftover units; ties go to the lower index.
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::int64_t r = total - assigned, i = 0; r > 0; --r, ++i) {
        ++counts[remainders[static_cast<std::size_t>(i)].second];
    }
    return counts;
}

namespace {

bool parse_double(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) {
        --last;
    }
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

// Minimal RFC-4180 field splitter (handles quoted fields with embedded
// commas and doubled quotes).
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

LabeledDataset load_csv_dataset(const std::string& path, int label_column) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open dataset file: " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::vector<std::size_t> line_numbers;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw invalid_input("dataset file is empty: " + path);

    const std::size_t cols = rows.front().size();
    if (cols < 2) throw parse_error("expected at least one feature column and a label", line_numbers[0]);
    const std::size_t label_idx =
        label_column < 0 ? cols - 1 : static_cast<std::size_t>(label_column);
    if (label_idx >= cols) throw invalid_input("label column index out of range");

    // Header detection: any non-numeric cell in a feature column of row 0.
    bool has_header = false;
    for (std::size_t j = 0; j < cols; ++j) {
        if (j == label_idx) continue;
        double unused;
        if (!parse_double(rows[0][j], unused)) {
            has_header = true;
            break;
        }
    }
    const std::size_t first_data = has_header ? 1 : 0;
    if (first_data >= rows.size()) throw invalid_input("dataset has a header but no data rows");

    // Decide label convention: all-integer cells are class indices,
    // anything else is a class name mapped by first appearance.
    bool all_int = true;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw parse_error("row has " + std::to_string(rows[r].size()) +
                                  " fields, expected " + std::to_string(cols),
                              line_numbers[r]);
        }
        const std::string cell = trim(rows[r][label_idx]);
        if (cell.empty() || cell.find_first_not_of("0123456789") != std::string::npos) {
            all_int = false;
        }
    }

    LabeledDataset ds;
    std::unordered_map<std::string, int> name_to_index;
    int max_label = -1;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        Vec x;
        x.reserve(cols - 1);
        for (std::size_t j = 0; j < cols; ++j) {
            if (j == label_idx) continue;
            double v;
            if (!parse_double(rows[r][j], v)) {
                throw parse_error("non-numeric feature value '" + trim(rows[r][j]) + "'",
                                  line_numbers[r]);
            }
            x.push_back(v);
        }
        int y;
        const std::string cell = trim(rows[r][label_idx]);
        if (all_int) {
            y = std::stoi(cell);
            max_label = std::max(max_label, y);
        } else {
            auto [it, inserted] =
                name_to_index.emplace(cell, static_cast<int>(name_to_index.size()));
            y = it->second;
            if (inserted) ds.class_names.push_back(cell);
        }
        ds.features.push_back(std::move(x));
        ds.labels.push_back(y);
    }

    ds.num_classes = all_int ? max_label + 1 : static_cast<int>(name_to_index.size());
    if (all_int) {
        const auto counts = ds.class_counts();
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] == 0) {
                throw invalid_input("integer labels leave class " + std::to_string(c) +
                                    " without instances");
            }
        }
    }
    return ds;
}

}  // namespace wola
