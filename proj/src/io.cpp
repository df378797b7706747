#include "brightdark/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace brightdark {

Format parse_format(const std::string& s)
{
    if (s == "csv")
        return Format::csv;
    if (s == "json")
        return Format::json;
    throw DomainError("unknown format '" + s + "' (expected csv or json)");
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        v = 0.0; // drop the sign of negative zero
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>)
                return format_number(v);
            else if constexpr (std::is_same_v<V, std::int64_t>)
                return std::to_string(v);
            else if constexpr (std::is_same_v<V, bool>)
                return v ? "1" : "0";
            else
                return v;
        },
        c);
}

Json json_cell(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> Json {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>)
                return std::isfinite(v) ? Json(v) : Json(nullptr);
            else
                return Json(v);
        },
        c);
}

Cell cell_from_json(const Json& j)
{
    if (j.is_boolean())
        return j.get<bool>();
    if (j.is_number_integer())
        return j.get<std::int64_t>();
    if (j.is_number())
        return j.get<double>();
    if (j.is_null())
        return std::nan("");
    return j.get<std::string>();
}

} // namespace

void write_csv(const Table& table, std::ostream& out)
{
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

Json to_json(const Table& table, const Json& meta)
{
    Json doc;
    doc["meta"] = meta;
    doc["columns"] = table.columns;
    Json data = Json::array();
    for (const auto& row : table.rows) {
        Json obj = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            obj[table.columns[i]] = json_cell(row[i]);
        data.push_back(std::move(obj));
    }
    doc["data"] = std::move(data);
    return doc;
}

Table table_from_json(const Json& doc)
{
    Table t;
    t.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& obj : doc.at("data")) {
        std::vector<Cell> row;
        row.reserve(t.columns.size());
        for (const auto& c : t.columns)
            row.push_back(cell_from_json(obj.at(c)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void emit(const Table& table, Format format, const Json& meta, std::ostream& sink)
{
    if (format == Format::csv)
        write_csv(table, sink);
    else
        sink << to_json(table, meta).dump(2) << '\n';
}

Table to_table(const FringeDataset& data)
{
    const auto& pts = data.points;
    const bool counts = !pts.empty() && std::all_of(pts.begin(), pts.end(), [](const auto& p) { return p.counts.has_value(); });
    const bool expected =
        !pts.empty() && std::all_of(pts.begin(), pts.end(), [](const auto& p) { return p.expected_counts.has_value(); });

    Table t;
    t.columns = {"phase_rad", "p_bright"};
    if (counts)
        t.columns.emplace_back("counts");
    if (expected)
        t.columns.emplace_back("expected_counts");
    for (const auto& p : pts) {
        std::vector<Cell> row{p.phase, p.p_bright};
        if (counts)
            row.emplace_back(static_cast<std::int64_t>(*p.counts));
        if (expected)
            row.emplace_back(*p.expected_counts);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table to_table(const std::vector<Sample>& samples, const std::string& x_name, const std::string& y_name)
{
    Table t;
    t.columns = {x_name, y_name};
    for (const auto& s : samples)
        t.rows.push_back({s.x, s.y});
    return t;
}

Table to_table(const std::vector<SpectrumLine>& spectrum)
{
    Table t;
    t.columns = {"freq_hz", "power_db", "is_peak"};
    for (const auto& l : spectrum)
        t.rows.push_back({l.frequency, l.power_db, l.is_peak});
    return t;
}

Json to_json(const EnbsConfig& cfg)
{
    Json j;
    j["alpha1"] = {cfg.alpha1.real(), cfg.alpha1.imag()};
    j["alpha2"] = {cfg.alpha2.real(), cfg.alpha2.imag()};
    j["r1"] = cfg.r1;
    j["r2"] = cfg.r2;
    j["phi_p1"] = cfg.phi_p1;
    j["phi_p2"] = cfg.phi_p2;
    j["phi_sd1"] = cfg.phi_sd1;
    j["phi_sd2"] = cfg.phi_sd2;
    return j;
}

Json to_json(const ScanSpec& spec)
{
    Json j;
    j["target"] = to_string(spec.target);
    j["start"] = spec.start;
    j["stop"] = spec.stop;
    j["steps"] = spec.steps;
    j["phi_s0"] = spec.phi_s0;
    j["base"] = to_json(spec.base);
    if (spec.noise) {
        j["noise"] = {{"frames_mean_counts", spec.noise->frames_mean_counts},
                      {"rng_seed", spec.noise->rng_seed},
                      {"background", spec.noise->background}};
    } else {
        j["noise"] = nullptr;
    }
    return j;
}

} // namespace brightdark
