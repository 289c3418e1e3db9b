#include "eivsparse/data_model.hpp"

#include "eivsparse/error.hpp"
#include "eivsparse/format.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace eivsparse {

using detail::require;

ReplicatedDataset::ReplicatedDataset(std::vector<Matrix> design_replicates,
                                     Matrix response_replicates,
                                     std::vector<std::string> sample_ids,
                                     std::vector<std::string> predictor_names,
                                     std::string response_name)
    : design_(std::move(design_replicates)),
      response_(std::move(response_replicates)),
      ids_(std::move(sample_ids)),
      names_(std::move(predictor_names)),
      response_name_(std::move(response_name))
{
    require(!design_.empty(), "dataset needs at least one replicate");
    const Index n = design_.front().rows();
    const Index p = design_.front().cols();
    require(n >= 1, "dataset has no samples");
    require(p >= 1, "dataset has no predictors");
    for (const auto& rep : design_) {
        require(rep.rows() == n && rep.cols() == p,
                "replicate slices must share the same (n, p) shape");
        require(rep.allFinite(), "design contains non-finite values");
    }
    require(response_.rows() == n, "response rows must match sample count");
    require(response_.cols() >= 1, "response needs at least one replicate");
    require(response_.allFinite(), "response contains non-finite values");
    if (ids_.empty()) {
        for (Index i = 0; i < n; ++i) ids_.push_back("s" + std::to_string(i + 1));
    }
    require(static_cast<Index>(ids_.size()) == n, "sample_ids length must equal n");
    if (names_.empty()) {
        for (Index j = 0; j < p; ++j) names_.push_back("x" + std::to_string(j + 1));
    }
    require(static_cast<Index>(names_.size()) == p, "predictor_names length must equal p");
}

Matrix ReplicatedDataset::variable_replicates(Index j) const
{
    require(j >= 0 && j < predictors(), "predictor index out of range");
    Matrix out(samples(), replicates());
    for (Index k = 0; k < replicates(); ++k) out.col(k) = design_[k].col(j);
    return out;
}

ReplicatedDataset ReplicatedDataset::subset(std::span<const Index> rows) const
{
    require(!rows.empty(), "subset must keep at least one sample");
    std::vector<Matrix> design;
    design.reserve(design_.size());
    for (const auto& rep : design_) {
        Matrix sub(static_cast<Index>(rows.size()), rep.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            require(rows[i] >= 0 && rows[i] < samples(), "subset index out of range");
            sub.row(static_cast<Index>(i)) = rep.row(rows[i]);
        }
        design.push_back(std::move(sub));
    }
    Matrix response(static_cast<Index>(rows.size()), response_.cols());
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        response.row(static_cast<Index>(i)) = response_.row(rows[i]);
        ids.push_back(ids_[static_cast<std::size_t>(rows[i])]);
    }
    return ReplicatedDataset(std::move(design), std::move(response), std::move(ids), names_,
                             response_name_);
}

// --- CSV ingestion --------------------------------------------------------

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// RFC 4180 style: double quotes delimit fields, "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

bool parse_number(const std::string& text, double& out)
{
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

} // namespace

ReplicatedDataset parse_replicated_csv(std::istream& in, const CsvSchema& schema,
                                       const std::string& source)
{
    std::string line;
    if (!std::getline(in, line)) throw InputError(source + ": empty file (header row required)");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_csv_line(line);

    std::map<std::string, std::size_t> column_of;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!column_of.emplace(header[c], c).second)
            throw InputError(source + ": duplicate column name '" + header[c] + "'");
    }
    auto locate = [&](const std::string& name, const char* role) {
        auto it = column_of.find(name);
        if (it == column_of.end())
            throw InputError(source + ": " + role + " column '" + name + "' not found in header");
        return it->second;
    };
    const std::size_t sample_col = locate(schema.sample_column, "sample-id");
    const std::size_t rep_col = locate(schema.replicate_column, "replicate-id");
    const std::size_t y_col = locate(schema.response_column, "response");

    std::vector<std::size_t> pred_cols;
    std::vector<std::string> pred_names;
    if (schema.predictor_columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == sample_col || c == rep_col || c == y_col) continue;
            pred_cols.push_back(c);
            pred_names.push_back(header[c]);
        }
    } else {
        for (const auto& name : schema.predictor_columns) {
            const std::size_t c = locate(name, "predictor");
            if (c == sample_col || c == rep_col || c == y_col)
                throw InputError(source + ": column '" + name + "' cannot be both a predictor and "
                                 "an id/response column");
            pred_cols.push_back(c);
            pred_names.push_back(name);
        }
    }
    if (pred_cols.empty()) throw InputError(source + ": no predictor columns");

    struct Row
    {
        std::vector<double> x;
        double y;
    };
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<Row>> rows_of;
    std::map<std::pair<std::string, std::string>, std::size_t> seen;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw InputError(source + ": line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(header.size()));
        }
        auto number = [&](std::size_t c) {
            double v = 0.0;
            if (!parse_number(fields[c], v)) {
                throw InputError(source + ": line " + std::to_string(line_no) + ", column '" +
                                 header[c] + "': non-numeric value '" + fields[c] + "'");
            }
            return v;
        };
        const std::string& sid = fields[sample_col];
        const std::string& rid = fields[rep_col];
        if (sid.empty())
            throw InputError(source + ": line " + std::to_string(line_no) + ": empty sample id");
        auto [it, inserted] = seen.emplace(std::make_pair(sid, rid), line_no);
        if (!inserted) {
            throw InputError(source + ": line " + std::to_string(line_no) +
                             ": duplicate (sample, replicate) key (" + sid + ", " + rid +
                             "), first seen on line " + std::to_string(it->second));
        }
        Row row;
        row.x.reserve(pred_cols.size());
        for (std::size_t c : pred_cols) row.x.push_back(number(c));
        row.y = number(y_col);
        auto& bucket = rows_of[sid];
        if (bucket.empty()) order.push_back(sid);
        bucket.push_back(std::move(row));
    }
    if (order.empty()) throw InputError(source + ": no data rows");

    const std::size_t r = rows_of[order.front()].size();
    for (const auto& sid : order) {
        if (rows_of[sid].size() != r) {
            throw InputError(source + ": ragged replicate counts (sample '" + order.front() +
                             "' has " + std::to_string(r) + ", sample '" + sid + "' has " +
                             std::to_string(rows_of[sid].size()) + ")");
        }
    }

    const auto n = static_cast<Index>(order.size());
    const auto p = static_cast<Index>(pred_cols.size());
    std::vector<Matrix> design(r, Matrix(n, p));
    Matrix response(n, static_cast<Index>(r));
    for (Index i = 0; i < n; ++i) {
        const auto& bucket = rows_of[order[static_cast<std::size_t>(i)]];
        for (std::size_t k = 0; k < r; ++k) {
            for (Index j = 0; j < p; ++j) design[k](i, j) = bucket[k].x[static_cast<std::size_t>(j)];
            response(i, static_cast<Index>(k)) = bucket[k].y;
        }
    }
    return ReplicatedDataset(std::move(design), std::move(response), std::move(order),
                             std::move(pred_names), schema.response_column);
}

ReplicatedDataset load_replicated_csv(const std::filesystem::path& path, const CsvSchema& schema)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path.string() + "'");
    return parse_replicated_csv(in, schema, path.string());
}

void write_replicated_csv(std::ostream& out, const ReplicatedDataset& ds, const CsvSchema& schema)
{
    require(ds.response_replicates() == ds.replicates(),
            "long-form CSV needs equal design and response replicate counts");
    out << schema.sample_column << ',' << schema.replicate_column << ',' << schema.response_column;
    for (const auto& name : ds.predictor_names()) out << ',' << name;
    out << '\n';
    for (Index i = 0; i < ds.samples(); ++i) {
        for (Index k = 0; k < ds.replicates(); ++k) {
            out << ds.sample_ids()[static_cast<std::size_t>(i)] << ',' << (k + 1) << ','
                << format_double(ds.response_replicates_matrix()(i, k));
            const Matrix& rep = ds.design_replicates()[static_cast<std::size_t>(k)];
            for (Index j = 0; j < ds.predictors(); ++j) out << ',' << format_double(rep(i, j));
            out << '\n';
        }
    }
}

// --- Collapse, standardize, scale ----------------------------------------

CollapsedData collapse_replicates(const ReplicatedDataset& ds)
{
    CollapsedData out;
    out.design = Matrix::Zero(ds.samples(), ds.predictors());
    for (const auto& rep : ds.design_replicates()) out.design += rep;
    out.design /= static_cast<double>(ds.replicates());
    out.response = ds.response_replicates_matrix().rowwise().mean();
    return out;
}

namespace {

struct ColumnStats
{
    double mean;
    double sd;
};

ColumnStats column_stats(const Eigen::Ref<const Vector>& v)
{
    const double mean = v.mean();
    const double ss = (v.array() - mean).square().sum();
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

bool is_degenerate(const ColumnStats& s, const Eigen::Ref<const Vector>& v)
{
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    return !(s.sd > 1e-13 * scale);
}

} // namespace

StandardizedDesign standardize(const Matrix& design, const Vector& response)
{
    require(design.rows() == response.size(), "design rows must match response length");
    require(design.rows() >= 2, "standardize needs n >= 2");
    require(design.allFinite() && response.allFinite(), "standardize: non-finite input");

    StandardizedDesign out;
    const Index p = design.cols();
    out.column_means.resize(p);
    out.column_sds.resize(p);
    out.X.resize(design.rows(), p);
    for (Index j = 0; j < p; ++j) {
        const auto s = column_stats(design.col(j));
        if (is_degenerate(s, design.col(j)))
            throw InputError("zero-variance column at index " + std::to_string(j));
        out.column_means[j] = s.mean;
        out.column_sds[j] = s.sd;
        out.X.col(j) = (design.col(j).array() - s.mean) / s.sd;
    }
    const auto ys = column_stats(response);
    if (is_degenerate(ys, response)) throw InputError("zero-variance response");
    out.y_mean = ys.mean;
    out.y_sd = ys.sd;
    out.y = (response.array() - ys.mean) / ys.sd;
    return out;
}

Matrix StandardizedDesign::transform(const Matrix& raw) const
{
    require(raw.cols() == column_means.size(), "transform: column count mismatch");
    return (raw.rowwise() - column_means.transpose()).array().rowwise() /
           column_sds.transpose().array();
}

Vector StandardizedDesign::transform_response(const Vector& raw) const
{
    return (raw.array() - y_mean) / y_sd;
}

Vector StandardizedDesign::response_to_raw(const Vector& standardized) const
{
    return (standardized.array() * y_sd + y_mean).matrix();
}

ScalingMatrix::ScalingMatrix(Vector diag) : diag_(std::move(diag))
{
    require(diag_.size() >= 1, "scaling matrix must be non-empty");
    for (Index j = 0; j < diag_.size(); ++j) {
        if (!(diag_[j] > 0.0) || !std::isfinite(diag_[j]))
            throw InputError("scaling entry " + std::to_string(j) + " must be finite and > 0");
    }
}

Matrix apply_scaling(const Matrix& X, const ScalingMatrix& D)
{
    require(X.cols() == D.size(), "apply_scaling: dimension mismatch");
    return X.array().rowwise() / D.diag().transpose().array();
}

Vector unscale_coefficients(const Vector& beta_scaled, const ScalingMatrix& D)
{
    require(beta_scaled.size() == D.size(), "unscale_coefficients: dimension mismatch");
    return beta_scaled.cwiseQuotient(D.diag());
}

Vector scale_coefficients(const Vector& beta, const ScalingMatrix& D)
{
    require(beta.size() == D.size(), "scale_coefficients: dimension mismatch");
    return beta.cwiseProduct(D.diag());
}

} // namespace eivsparse
