#include "hysta/trace.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hysta {

const char* const kTraceHeader =
    "t,r,r_dot,q_meas,q_true,qdot_true,P_meas,P_true,e1,s,u,u_tilde,g,"
    "noise_q,noise_P,v_integral,w_integral";

namespace {

std::array<const std::vector<double>*, 17> columns(const SimTrace& tr) {
    return {&tr.t, &tr.r, &tr.r_dot, &tr.q_meas, &tr.q_true, &tr.qdot_true,
            &tr.P_meas, &tr.P_true, &tr.e1, &tr.s, &tr.u, &tr.u_tilde, &tr.g,
            &tr.noise_q, &tr.noise_P, &tr.v_integral, &tr.w_integral};
}

std::array<std::vector<double>*, 17> columns(SimTrace& tr) {
    return {&tr.t, &tr.r, &tr.r_dot, &tr.q_meas, &tr.q_true, &tr.qdot_true,
            &tr.P_meas, &tr.P_true, &tr.e1, &tr.s, &tr.u, &tr.u_tilde, &tr.g,
            &tr.noise_q, &tr.noise_P, &tr.v_integral, &tr.w_integral};
}

} // namespace

void write_trace_csv(const SimTrace& trace, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
    std::fprintf(f, "%s\n", kTraceHeader);
    const auto cols = columns(trace);
    char buf[32];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", (*cols[c])[i]);
            std::fputs(buf, f);
            std::fputc(c + 1 == cols.size() ? '\n' : ',', f);
        }
    }
    std::fclose(f);
}

void write_trace_metadata(const SimTrace& trace, const std::string& path) {
    nlohmann::json j;
    j["config_hash"] = trace.config_hash;
    j["seed"] = trace.seed;
    j["rng"] = trace.rng_name;
    j["controller"] = trace.controller;
    j["rows"] = trace.size();
    j["columns"] = kTraceHeader;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_metadata: cannot open " + path);
    out << j.dump(2) << "\n";
}

SimTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
        throw std::runtime_error("read_trace_csv: header mismatch in " + path);
    SimTrace tr;
    auto cols = columns(tr);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::size_t c = 0;
        while (std::getline(ss, field, ',')) {
            if (c >= cols.size())
                throw std::runtime_error("read_trace_csv: too many fields in " + path);
            cols[c++]->push_back(std::stod(field));
        }
        if (c != cols.size())
            throw std::runtime_error("read_trace_csv: short row in " + path);
    }
    return tr;
}

} // namespace hysta
