#include "sparsekit/problem_io.hpp"

#include "sparsekit/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace sparsekit {

namespace {

std::string next_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(std::string("unexpected end of file reading ") + what);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

template <typename T>
std::vector<T> parse_fields(const std::string& line, std::size_t expected, const char* what) {
    std::istringstream fields(line);
    std::vector<T> values;
    values.reserve(expected);
    T value{};
    while (fields >> value) {
        values.push_back(value);
    }
    if (!fields.eof()) {
        throw ParseError(std::string("malformed number in ") + what);
    }
    if (values.size() != expected) {
        throw ParseError(std::string(what) + ": expected " + std::to_string(expected) + " fields, got " +
                         std::to_string(values.size()));
    }
    return values;
}

}  // namespace

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_problem(std::ostream& out, const ProblemInstance& problem) {
    const Matrix& d = problem.dictionary.matrix();
    out << d.rows() << ' ' << d.cols() << ' ' << problem.true_support.size() << ' ' << problem.seed << '\n';
    for (std::size_t i = 0; i < problem.true_support.size(); ++i) {
        out << (i ? " " : "") << problem.true_support[i] + 1;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            out << (j ? " " : "") << format_double(d(i, j));
        }
        out << '\n';
    }
    for (Eigen::Index i = 0; i < problem.signal.size(); ++i) {
        out << (i ? " " : "") << format_double(problem.signal[i]);
    }
    out << '\n';
}

ProblemInstance read_problem(std::istream& in) {
    std::istringstream header(next_line(in, "header"));
    long n = 0, m = 0, k = 0;
    std::uint64_t seed = 0;
    std::string extra;
    if (!(header >> n >> m >> k >> seed) || (header >> extra)) {
        throw ParseError("header must be `N M K seed`");
    }
    if (n < 1 || m < 1 || k < 0 || k > m) {
        throw ParseError("header dimensions out of range");
    }

    const auto one_based = parse_fields<long>(next_line(in, "support"), static_cast<std::size_t>(k), "support line");
    IndexSet support;
    for (long index : one_based) {
        if (index < 1 || index > m) {
            throw ParseError("support index " + std::to_string(index) + " out of range");
        }
        support.push_back(static_cast<int>(index - 1));
    }
    if (sorted(support) != support || std::adjacent_find(support.begin(), support.end()) != support.end()) {
        throw ParseError("support indices must be strictly increasing");
    }

    Matrix entries(n, m);
    for (long i = 0; i < n; ++i) {
        const auto row = parse_fields<double>(next_line(in, "dictionary row"), static_cast<std::size_t>(m), "dictionary row");
        for (long j = 0; j < m; ++j) {
            entries(i, j) = row[static_cast<std::size_t>(j)];
        }
    }
    const auto signal_fields = parse_fields<double>(next_line(in, "signal"), static_cast<std::size_t>(n), "signal line");
    Vector signal = Eigen::Map<const Vector>(signal_fields.data(), n);

    std::string trailing;
    while (std::getline(in, trailing)) {
        if (trailing.find_first_not_of(" \t\r") != std::string::npos) {
            throw ParseError("unexpected content after signal line");
        }
    }

    Dictionary dict = [&] {
        try {
            return Dictionary::from_unit_columns(std::move(entries));
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what());
        }
    }();
    Vector values;
    try {
        values = restricted_ls_solve(dict, support, signal);
    } catch (const RankDeficient&) {
        throw ParseError("support columns are linearly dependent");
    }
    return ProblemInstance{std::move(dict), std::move(support), std::move(values), std::move(signal), seed};
}

void save_problem(const std::filesystem::path& path, const ProblemInstance& problem) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_problem(out, problem);
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

ProblemInstance load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_problem(in);
}

}  // namespace sparsekit
