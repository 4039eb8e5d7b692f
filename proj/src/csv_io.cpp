#include "epimod/csv_io.hpp"

#include "epimod/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace epimod::io {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw_error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad number '" + text + "'");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(Errc::ParseError, "cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // LF line endings on every platform
    if (!out) throw_error(Errc::ParseError, "cannot write '" + path + "'");
    return out;
}

} // namespace

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::map<std::string, EpidemicSeries> ingest_truth_csv(const std::string& path,
                                                       IngestReport* report) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw_error(Errc::ParseError, "empty file '" + path + "'");
    ++line_no;
    {
        const auto header = split_csv(trim(line));
        if (header.size() != 3 || trim(header[0]) != "date" || trim(header[1]) != "location" ||
            trim(header[2]) != "value") {
            throw_error(Errc::ParseError, "expected header date,location,value in '" + path + "'");
        }
    }

    struct Row {
        Date date;
        double value;
    };
    std::map<std::string, std::vector<Row>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto fields = split_csv(trimmed);
        if (fields.size() != 3) {
            throw_error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 3 fields");
        }
        const Date date = Date::parse(trim(fields[0]));
        const std::string location = trim(fields[1]);
        const double value = parse_double(trim(fields[2]), line_no);

        auto& list = rows[location];
        if (!list.empty()) {
            if (date == list.back().date) {
                throw_error(Errc::ParseError, "line " + std::to_string(line_no) +
                                                  ": duplicate date for location '" + location + "'");
            }
            if (date < list.back().date) {
                throw_error(Errc::NonMonotoneDates, "location '" + location + "' at line " +
                                                        std::to_string(line_no));
            }
        }
        list.push_back({date, value});
    }

    std::map<std::string, EpidemicSeries> out;
    for (const auto& [location, list] : rows) {
        // Weekly cadence when every observed gap is a whole number of weeks.
        bool weekly = list.size() > 1;
        for (std::size_t i = 1; i < list.size(); ++i) {
            if ((list[i].date - list[i - 1].date) % 7 != 0) weekly = false;
        }
        const int step = weekly ? 7 : 1;

        EpidemicSeries series;
        series.location = location;
        series.cadence = weekly ? Cadence::weekly : Cadence::daily;
        series.start_date = list.front().date;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i > 0) {
                const std::int64_t gap = (list[i].date - list[i - 1].date) / step;
                for (std::int64_t g = 1; g < gap; ++g) {
                    const double frac = static_cast<double>(g) / static_cast<double>(gap);
                    series.values.push_back(list[i - 1].value +
                                            frac * (list[i].value - list[i - 1].value));
                    if (report) {
                        ++report->interpolated_points;
                        report->warnings.push_back(
                            "interpolated " + location + " at " +
                            (list[i - 1].date + g * step).to_string());
                    }
                }
            }
            series.values.push_back(list[i].value);
        }
        validate_series(series);
        out.emplace(location, std::move(series));
    }
    return out;
}

void write_truth_csv(const std::string& path,
                     const std::map<std::string, EpidemicSeries>& by_location) {
    std::ofstream out = open_output(path);
    out << "date,location,value\n";
    for (const auto& [location, series] : by_location) {
        for (std::size_t i = 0; i < series.size(); ++i) {
            out << series.date_at(i).to_string() << ',' << location << ','
                << format_value(series.values[i]) << '\n';
        }
    }
}

namespace {

struct TargetInfo {
    int horizon = 0;
    std::string unit; // "day" or "wk"
    std::string suffix;
};

TargetInfo parse_target(const std::string& target, std::size_t line_no) {
    TargetInfo info;
    std::istringstream ss(target);
    std::string ahead;
    if (!(ss >> info.horizon >> info.unit >> ahead) || ahead != "ahead" || info.horizon < 1 ||
        (info.unit != "day" && info.unit != "wk")) {
        throw_error(Errc::UnparseableTarget,
                    "line " + std::to_string(line_no) + ": target '" + target + "'");
    }
    std::string rest;
    std::getline(ss, rest);
    info.suffix = trim(rest);
    if (info.suffix.empty()) {
        throw_error(Errc::UnparseableTarget,
                    "line " + std::to_string(line_no) + ": target '" + target + "' has no metric");
    }
    return info;
}

} // namespace

HubFile ingest_hub_forecasts(const std::string& path, const std::string& expected_suffix,
                             IngestReport* report) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw_error(Errc::ParseError, "empty file '" + path + "'");
    ++line_no;
    {
        const auto header = split_csv(trim(line));
        const char* expected[] = {"forecast_date", "target", "target_end_date",
                                  "location",      "type",   "quantile",
                                  "value"};
        if (header.size() != 7) {
            throw_error(Errc::ParseError, "expected 7 hub columns in '" + path + "'");
        }
        for (int i = 0; i < 7; ++i) {
            if (trim(header[i]) != expected[i]) {
                throw_error(Errc::ParseError,
                            "unexpected hub column '" + trim(header[i]) + "' in '" + path + "'");
            }
        }
    }

    HubFile hub;
    hub.target_suffix = expected_suffix;
    std::string unit;

    struct GroupKey {
        std::string location;
        std::int64_t date;
        bool operator<(const GroupKey& other) const {
            return std::tie(location, date) < std::tie(other.location, other.date);
        }
    };
    struct Group {
        std::map<int, double> point;                         // horizon -> value
        std::map<double, std::map<int, double>> quantiles;   // level -> horizon -> value
    };
    std::map<GroupKey, Group> groups;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto fields = split_csv(trimmed);
        if (fields.size() != 7) {
            throw_error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 7 fields");
        }
        const Date forecast_date = Date::parse(trim(fields[0]));
        const TargetInfo target = parse_target(trim(fields[1]), line_no);
        if (hub.target_suffix.empty()) hub.target_suffix = target.suffix;
        if (unit.empty()) unit = target.unit;
        if (target.suffix != hub.target_suffix || target.unit != unit) {
            throw_error(Errc::UnparseableTarget, "line " + std::to_string(line_no) +
                                                     ": target '" + trim(fields[1]) +
                                                     "' does not match '" + unit + " ahead " +
                                                     hub.target_suffix + "'");
        }
        const std::string location = trim(fields[3]);
        const std::string type = trim(fields[4]);
        const double value = parse_double(trim(fields[6]), line_no);

        Group& group = groups[{location, forecast_date.serial()}];
        if (type == "point") {
            if (!group.point.emplace(target.horizon, value).second) {
                throw_error(Errc::ParseError,
                            "line " + std::to_string(line_no) + ": duplicate point row");
            }
        } else if (type == "quantile") {
            const double level = parse_double(trim(fields[5]), line_no);
            if (!(level > 0.0 && level < 1.0)) {
                throw_error(Errc::ParseError,
                            "line " + std::to_string(line_no) + ": quantile level outside (0,1)");
            }
            if (!group.quantiles[level].emplace(target.horizon, value).second) {
                throw_error(Errc::ParseError,
                            "line " + std::to_string(line_no) + ": duplicate quantile row");
            }
        } else {
            throw_error(Errc::ParseError,
                        "line " + std::to_string(line_no) + ": unknown type '" + type + "'");
        }
    }
    hub.cadence = unit == "wk" ? Cadence::weekly : Cadence::daily;

    auto contiguous = [](const std::map<int, double>& by_horizon, const std::string& what) {
        std::vector<double> values;
        int expected = 1;
        for (const auto& [h, v] : by_horizon) {
            if (h != expected) {
                throw_error(Errc::InconsistentHorizons,
                            what + ": horizon " + std::to_string(expected) + " missing");
            }
            values.push_back(v);
            ++expected;
        }
        return values;
    };

    for (const auto& [key, group] : groups) {
        const std::string what =
            key.location + " @ " + Date(key.date).to_string();
        ForecastSet fs;
        fs.location = key.location;
        fs.origin_date = Date(key.date);
        fs.origin_index = 0; // located against a truth series on demand

        for (const auto& [level, by_horizon] : group.quantiles) {
            QuantileTrack track;
            track.level = level;
            track.values = contiguous(by_horizon, what + " q" + std::to_string(level));
            fs.quantiles.push_back(std::move(track));
        }
        if (!group.quantiles.empty()) {
            const std::size_t k = fs.quantiles.front().values.size();
            for (const auto& track : fs.quantiles) {
                if (track.values.size() != k) {
                    throw_error(Errc::InconsistentHorizons, what + ": ragged quantile horizons");
                }
            }
        }

        if (!group.point.empty()) {
            fs.point = contiguous(group.point, what + " point");
        } else {
            const QuantileTrack* median = fs.find_level(0.5);
            if (!median) {
                throw_error(Errc::ParseError, what + ": no point rows and no median quantile");
            }
            fs.point = median->values;
        }
        if (!fs.quantiles.empty() && fs.quantiles.front().values.size() != fs.point.size()) {
            throw_error(Errc::InconsistentHorizons, what + ": point and quantile horizons differ");
        }

        // Repair quantile crossings by per-horizon monotone rearrangement.
        for (std::size_t h = 0; h < fs.horizons(); ++h) {
            std::vector<double> column;
            column.reserve(fs.quantiles.size());
            for (const auto& track : fs.quantiles) column.push_back(track.values[h]);
            if (!std::is_sorted(column.begin(), column.end())) {
                std::sort(column.begin(), column.end());
                for (std::size_t q = 0; q < fs.quantiles.size(); ++q) {
                    fs.quantiles[q].values[h] = column[q];
                }
                if (report) {
                    ++report->quantile_repairs;
                    report->warnings.push_back("sorted crossing quantiles: " + what +
                                               " horizon " + std::to_string(h + 1));
                }
            }
        }
        validate_forecast_set(fs);
        hub.forecasts.push_back(std::move(fs));
    }
    return hub;
}

void write_hub_csv(const std::string& path, const HubFile& file) {
    std::ofstream out = open_output(path);
    out << "forecast_date,target,target_end_date,location,type,quantile,value\n";

    std::vector<const ForecastSet*> sorted;
    sorted.reserve(file.forecasts.size());
    for (const auto& fs : file.forecasts) sorted.push_back(&fs);
    std::sort(sorted.begin(), sorted.end(), [](const ForecastSet* a, const ForecastSet* b) {
        return std::tie(a->location, a->origin_date) < std::tie(b->location, b->origin_date);
    });

    const int step = cadence_step_days(file.cadence);
    const std::string unit = file.cadence == Cadence::weekly ? "wk" : "day";
    for (const ForecastSet* fs : sorted) {
        for (std::size_t h = 1; h <= fs->horizons(); ++h) {
            const std::string target =
                std::to_string(h) + " " + unit + " ahead " + file.target_suffix;
            const std::string end_date =
                (fs->origin_date + static_cast<std::int64_t>(h) * step).to_string();
            const std::string prefix = fs->origin_date.to_string() + "," + target + "," + end_date +
                                       "," + fs->location + ",";
            out << prefix << "point,," << format_value(fs->point[h - 1]) << '\n';
            for (const auto& track : fs->quantiles) {
                char level[32];
                std::snprintf(level, sizeof(level), "%g", track.level);
                out << prefix << "quantile," << level << ',' << format_value(track.values[h - 1])
                    << '\n';
            }
        }
    }
}

void write_score_csv(const std::string& path, const std::vector<ScoreRecord>& records) {
    std::ofstream out = open_output(path);
    out << "forecast_date,location,horizon,observed,predicted,abs_error,wis\n";
    std::vector<const ScoreRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& rec : records) sorted.push_back(&rec);
    std::sort(sorted.begin(), sorted.end(), [](const ScoreRecord* a, const ScoreRecord* b) {
        return std::tie(a->location, a->origin_date, a->horizon) <
               std::tie(b->location, b->origin_date, b->horizon);
    });
    for (const ScoreRecord* rec : sorted) {
        out << rec->origin_date.to_string() << ',' << rec->location << ',' << rec->horizon << ','
            << format_value(rec->observed) << ',' << format_value(rec->predicted_point) << ','
            << format_value(rec->absolute_error) << ','
            << (rec->wis ? format_value(*rec->wis) : "") << '\n';
    }
}

std::vector<ScoreRecord> read_score_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw_error(Errc::ParseError, "empty file '" + path + "'");
    ++line_no;
    if (trim(line) != "forecast_date,location,horizon,observed,predicted,abs_error,wis") {
        throw_error(Errc::ParseError, "unexpected score header in '" + path + "'");
    }
    std::vector<ScoreRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto fields = split_csv(trimmed);
        if (fields.size() != 7) {
            throw_error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 7 fields");
        }
        ScoreRecord rec = make_score_record(
            Date::parse(trim(fields[0])), trim(fields[1]),
            static_cast<int>(parse_double(trim(fields[2]), line_no)),
            parse_double(trim(fields[3]), line_no), parse_double(trim(fields[4]), line_no));
        if (!trim(fields[6]).empty()) rec.wis = parse_double(trim(fields[6]), line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_theta_trace_csv(const std::string& path, const std::vector<ThetaTraceRow>& rows) {
    std::ofstream out = open_output(path);
    out << "forecast_date,location,theta,theta_scaled,objective_zero,objective_opt,origins_used\n";
    char buf[256];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g", row.estimate.theta.effective(),
                      row.estimate.theta.value, row.estimate.objective_at_zero,
                      row.estimate.objective_at_optimum);
        out << row.forecast_date.to_string() << ',' << row.location << ',' << buf << ','
            << row.estimate.origins_used << '\n';
    }
}

void write_aggregate_csv(const std::string& path, const std::string& model_name,
                         const std::vector<AggregateRow>& rows) {
    std::ofstream out = open_output(path);
    out << "window,model,base_mae,model_mae,abs_reduction,pct_improvement,n_records\n";
    for (const auto& row : rows) {
        out << row.window << ',' << model_name << ',' << format_value(row.base_mean) << ','
            << format_value(row.model_mean) << ',' << format_value(row.abs_reduction) << ','
            << format_value(row.pct_improvement) << ',' << row.n_records << '\n';
    }
}

} // namespace epimod::io
