#include "piq/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace piq {

namespace {

using nlohmann::json;

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        cells.push_back(first == std::string::npos
                            ? std::string()
                            : cell.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end && !cell.empty();
}

json config_to_json(const FitConfig& config) {
    json j;
    j["solver"] = solver_name(config.solver);
    j["q_gamma"] = config.q_gamma;
    if (config.q_beta) j["q_beta"] = *config.q_beta;
    j["nu"] = config.nu;
    j["nu_beta"] = config.nu_beta;
    if (config.lambda) j["lambda"] = *config.lambda;
    if (config.gamma_schedule) {
        j["cooling"] = config.gamma_schedule->name();
        j["horizon"] = config.gamma_schedule->horizon;
    }
    j["max_iters"] = config.max_iters;
    j["tol_objective"] = config.tol_objective;
    j["tol_iterate"] = config.tol_iterate;
    j["seed"] = config.seed;
    j["standardize"] = config.standardized;
    return j;
}

} // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= static_cast<std::uint64_t>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

Dataset parse_csv(const std::string& content, const std::string& response,
                  const std::string& origin) {
    std::vector<std::vector<std::string>> rows;
    {
        std::stringstream ss(content);
        std::string line;
        while (std::getline(ss, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            rows.push_back(split_line(line));
        }
    }
    require(!rows.empty(), ErrorKind::data, origin + ": empty input");
    const std::size_t ncols = rows.front().size();
    require(ncols >= 2, ErrorKind::data,
            origin + ": need at least two columns (response + one predictor)");
    for (std::size_t r = 0; r < rows.size(); ++r)
        require(rows[r].size() == ncols, ErrorKind::data,
                origin + ": row " + std::to_string(r + 1) + " has " +
                    std::to_string(rows[r].size()) + " cells, expected " +
                    std::to_string(ncols));

    // Header detection: any non-numeric cell in the first row.
    bool has_header = false;
    for (const std::string& cell : rows.front()) {
        double tmp;
        if (!parse_double(cell, tmp)) {
            has_header = true;
            break;
        }
    }
    std::vector<std::string> header;
    if (has_header) header = rows.front();

    // Resolve the response column by header name, then by 0-based index.
    std::size_t response_col = ncols;
    if (has_header) {
        for (std::size_t c = 0; c < ncols; ++c)
            if (header[c] == response) response_col = c;
    }
    if (response_col == ncols) {
        double idx;
        if (parse_double(response, idx) && idx >= 0 &&
            idx < static_cast<double>(ncols) && idx == static_cast<double>(static_cast<std::size_t>(idx)))
            response_col = static_cast<std::size_t>(idx);
    }
    require(response_col < ncols, ErrorKind::usage,
            origin + ": response column '" + response + "' not found");

    const std::size_t first_data = has_header ? 1 : 0;
    const Index n = static_cast<Index>(rows.size() - first_data);
    require(n >= 1, ErrorKind::data, origin + ": no data rows");
    const Index p = static_cast<Index>(ncols - 1);

    Dataset data;
    data.X.resize(n, p);
    data.y.resize(n);
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        Index j = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            double value;
            if (!parse_double(rows[r][c], value))
                throw_error(ErrorKind::data,
                            origin + ": non-numeric cell at row " + std::to_string(r + 1) +
                                ", column " + std::to_string(c + 1) + ": '" + rows[r][c] +
                                "'");
            if (c == response_col)
                data.y(static_cast<Index>(r - first_data)) = value;
            else
                data.X(static_cast<Index>(r - first_data), j++) = value;
        }
    }
    if (has_header) {
        std::vector<std::string> names;
        for (std::size_t c = 0; c < ncols; ++c)
            if (c != response_col) names.push_back(header[c]);
        data.feature_names = names;
    }
    data.validate();
    return data;
}

Dataset read_csv(const std::string& path, const std::string& response) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::data, "cannot open file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), response, path);
}

std::string RunManifest::to_json_line(bool include_timing) const {
    json j;
    j["record"] = "manifest";
    j["command"] = command;
    j["config"] = json::parse(config_json.empty() ? "{}" : config_json);
    j["seed"] = seed;
    j["version"] = version;
    j["input_digest"] = input_digest;
    if (include_timing) j["wall_clock_seconds"] = wall_clock_seconds;
    return j.dump();
}

std::string estimate_to_jsonl(const Estimate& estimate, const RunManifest& manifest,
                              bool include_timing) {
    RunManifest m = manifest;
    if (m.config_json.empty()) m.config_json = config_to_json(estimate.config).dump();
    std::string out = m.to_json_line(include_timing);
    out += '\n';

    json j;
    j["record"] = "estimate";
    j["beta"] = std::vector<double>(estimate.beta.data(),
                                    estimate.beta.data() + estimate.beta.size());
    j["gamma"] = std::vector<double>(estimate.gamma.data(),
                                     estimate.gamma.data() + estimate.gamma.size());
    j["support_gamma"] = estimate.support_gamma;
    j["support_beta"] = estimate.support_beta;
    j["iterations"] = estimate.iterations;
    j["converged"] = estimate.converged;
    j["tie_events"] = estimate.tie_events;
    j["fixed_point_residual"] = estimate.fixed_point_residual;
    if (!estimate.objective_trace.empty()) {
        j["objective_first"] = estimate.objective_trace.front();
        j["objective_last"] = estimate.objective_trace.back();
        j["objective_evaluations"] = estimate.objective_trace.size();
    }
    j["metadata"] = estimate.metadata;
    out += j.dump();
    out += '\n';
    return out;
}

std::string tune_to_csv(const TuneResult& result) {
    std::ostringstream out;
    out << "q,loss_term,penalty_term,total,selected\n";
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
        const PicScore& s = result.scores[i];
        out << result.grid[i] << ',' << s.loss_term << ',' << s.penalty_term << ','
            << s.total << ',' << (result.grid[i] == result.best_q ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string replication_table_to_csv(const ReplicationTable& table,
                                     const std::string& label, bool include_timing) {
    std::ostringstream out;
    out << "setting,Err,M,JD,FA";
    if (table.has_beta_metrics) out << ",M_beta,FA_beta,JD_beta";
    if (include_timing) out << ",T";
    out << '\n';
    out << label << ',' << table.err_mean << ',' << table.masking_percent << ','
        << table.jd_percent << ',' << table.false_alarm_mean;
    if (table.has_beta_metrics)
        out << ',' << table.beta_masking_percent << ',' << table.beta_false_alarm_mean
            << ',' << table.beta_jd_percent;
    if (include_timing) out << ',' << table.total_seconds;
    out << '\n';
    return out.str();
}

} // namespace piq
