#include "fuzzybridge/fuzzybridge.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "fb/app/app.hpp"
#include "fb/common/error.hpp"
#include "fb/data/data.hpp"
#include "fb/verify/verify.hpp"

struct fb_dataset {
    fb::Dataset data;
};

struct fb_model {
    fb::app::AnyModel model;
};

namespace {

thread_local std::string last_error;

fb_status fail(fb_status status, const char* message)
{
    last_error = message;
    return status;
}

// Runs body, translating every exception into a status code.
template <class F>
fb_status guarded(F&& body)
{
    last_error.clear();
    try {
        body();
        return FB_OK;
    } catch (const fb::InvalidArgument& e) {
        return fail(FB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const fb::DataError& e) {
        return fail(FB_ERR_DATA, e.what());
    } catch (const fb::ModelError& e) {
        return fail(FB_ERR_MODEL, e.what());
    } catch (const fb::Json::exception& e) {
        return fail(FB_ERR_DATA, e.what());
    } catch (const std::bad_alloc&) {
        return fail(FB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(FB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(FB_ERR_INTERNAL, "unknown error");
    }
}

char* copy_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void require(const void* p, const char* what)
{
    if (!p)
        throw fb::InvalidArgument(std::string(what) + " must not be NULL");
}

fb::Json options_from(const char* text)
{
    if (!text || !*text)
        return fb::Json(nullptr);
    fb::Json j = fb::app::parse_json(text, "options");
    if (!j.is_object() && !j.is_null())
        throw fb::InvalidArgument("options must be a JSON object");
    return j;
}

}  // namespace

extern "C" {

const char* fb_version(void) { return "0.1.0"; }

const char* fb_last_error(void) { return last_error.c_str(); }

void fb_string_free(char* s) { std::free(s); }

fb_status fb_dataset_load_csv(const char* path, fb_dataset** out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new fb_dataset{fb::data::load_csv(path)};
    });
}

fb_status fb_dataset_from_arrays(size_t n, size_t dim, const double* inputs, const double* targets, fb_dataset** out)
{
    return guarded([&] {
        require(out, "out");
        if (n > 0) {
            require(inputs, "inputs");
            require(targets, "targets");
        }
        if (dim == 0)
            throw fb::InvalidArgument("dataset dimension must be >= 1");
        *out = new fb_dataset{fb::Dataset(dim, std::vector<double>(inputs, inputs + n * dim),
                                          std::vector<double>(targets, targets + n))};
    });
}

fb_status fb_dataset_generate(const char* spec, fb_dataset** out)
{
    return guarded([&] {
        require(spec, "spec");
        require(out, "out");
        *out = new fb_dataset{fb::data::generate(fb::data::parse_data_spec(fb::data::parse_key_values(spec)))};
    });
}

fb_status fb_dataset_save_csv(const fb_dataset* data, const char* path)
{
    return guarded([&] {
        require(data, "data");
        require(path, "path");
        fb::data::save_csv(path, data->data);
    });
}

fb_status fb_dataset_to_csv(const fb_dataset* data, char** out)
{
    return guarded([&] {
        require(data, "data");
        require(out, "out");
        *out = copy_string(fb::data::format_csv(data->data));
    });
}

size_t fb_dataset_size(const fb_dataset* data) { return data ? data->data.size() : 0; }

size_t fb_dataset_dim(const fb_dataset* data) { return data ? data->data.dim() : 0; }

fb_status fb_dataset_split(const fb_dataset* data, double test_fraction, uint64_t seed, fb_dataset** train,
                           fb_dataset** test)
{
    return guarded([&] {
        require(data, "data");
        require(train, "train");
        require(test, "test");
        fb::data::Split s = fb::data::split(data->data, test_fraction, seed);
        auto* tr = new fb_dataset{std::move(s.train)};
        try {
            *test = new fb_dataset{std::move(s.test)};
        } catch (...) {
            delete tr;
            throw;
        }
        *train = tr;
    });
}

void fb_dataset_free(fb_dataset* data) { delete data; }

fb_status fb_model_load(const char* path, fb_model** out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new fb_model{fb::app::load_model(path)};
    });
}

fb_status fb_model_from_json(const char* json, fb_model** out)
{
    return guarded([&] {
        require(json, "json");
        require(out, "out");
        *out = new fb_model{fb::app::model_from_json(fb::app::parse_json(json, "model"))};
    });
}

fb_status fb_model_save(const fb_model* model, const char* path)
{
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        fb::app::save_model(path, model->model);
    });
}

fb_status fb_model_to_json(const fb_model* model, char** out)
{
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = copy_string(fb::app::dump_json(fb::app::model_to_json(model->model)));
    });
}

const char* fb_model_kind(const fb_model* model)
{
    if (!model)
        return "";
    static const char* const kinds[] = {"tsk", "rbfn", "moe", "tree", "fuzzy_tree", "stack"};
    return kinds[model->model.index()];
}

size_t fb_model_input_dim(const fb_model* model) { return model ? fb::app::input_dim(model->model) : 0; }

fb_status fb_model_predict(const fb_model* model, const double* x, size_t dim, double* y)
{
    return guarded([&] {
        require(model, "model");
        require(x, "x");
        require(y, "y");
        if (dim != fb::app::input_dim(model->model))
            throw fb::DataError("input has " + std::to_string(dim) + " features, model expects " +
                                std::to_string(fb::app::input_dim(model->model)));
        *y = fb::app::predict(model->model, std::span<const double>(x, dim));
    });
}

fb_status fb_model_predict_dataset(const fb_model* model, const fb_dataset* data, double* out)
{
    return guarded([&] {
        require(model, "model");
        require(data, "data");
        require(out, "out");
        const std::vector<double> p = fb::app::predict(model->model, data->data);
        std::copy(p.begin(), p.end(), out);
    });
}

fb_status fb_model_mse(const fb_model* model, const fb_dataset* data, double* mse)
{
    return guarded([&] {
        require(model, "model");
        require(data, "data");
        require(mse, "mse");
        if (data->data.empty())
            throw fb::DataError("cannot evaluate on an empty dataset");
        *mse = fb::mse(fb::app::predict(model->model, data->data), data->data.targets());
    });
}

fb_status fb_model_convert(const fb_model* model, const char* target, fb_model** out)
{
    return guarded([&] {
        require(model, "model");
        require(target, "target");
        require(out, "out");
        *out = new fb_model{fb::app::convert(model->model, target)};
    });
}

fb_status fb_model_describe(const fb_model* model, char** out)
{
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        std::string text;
        for (const std::string& line : fb::app::describe(model->model))
            text += line + "\n";
        *out = copy_string(text);
    });
}

void fb_model_free(fb_model* model) { delete model; }

fb_status fb_train(const char* method, const fb_dataset* train, const fb_dataset* test, const char* options_json,
                   fb_model** model, char** metrics_json, char** history_jsonl)
{
    return guarded([&] {
        require(method, "method");
        require(train, "train");
        require(model, "model");
        const fb::Dataset empty(train->data.dim());
        fb::app::TrainOutcome r =
            fb::app::train(method, train->data, test ? test->data : empty, options_from(options_json));
        char* metrics = metrics_json ? copy_string(fb::app::dump_json(r.metrics)) : nullptr;
        char* history = nullptr;
        try {
            if (history_jsonl)
                history = copy_string(fb::history_to_jsonl(r.history));
            *model = new fb_model{std::move(r.model)};
        } catch (...) {
            std::free(metrics);
            std::free(history);
            throw;
        }
        if (metrics_json)
            *metrics_json = metrics;
        if (history_jsonl)
            *history_jsonl = history;
    });
}

fb_status fb_verify(const char* suite, const char* options_json, const fb_model* model, const fb_dataset* data,
                    char** report_json, char** report_text, int* passed)
{
    return guarded([&] {
        require(suite, "suite");
        require(report_json, "report_json");
        require(passed, "passed");
        const fb::verify::Suite s = fb::verify::parse_suite(suite);
        const fb::Json opts = options_from(options_json);
        fb::verify::Options o;
        if (opts.is_object()) {
            for (const auto& item : opts.items()) {
                const std::string& key = item.key();
                const fb::Json& v = item.value();
                if (key == "trials" && v.is_number_unsigned())
                    o.trials = v.get<std::size_t>();
                else if (key == "points" && v.is_number_unsigned())
                    o.points = v.get<std::size_t>();
                else if (key == "seed" && v.is_number_unsigned())
                    o.seed = v.get<std::uint64_t>();
                else if (key == "tol" && v.is_number())
                    o.tolerance = v.get<double>();
                else
                    throw fb::InvalidArgument("verify option '" + key + "' is unknown or has the wrong type");
            }
        }
        const fb::Dataset* d = data ? &data->data : nullptr;
        if (d && model && d->dim() != fb::app::input_dim(model->model))
            throw fb::DataError("dataset dimension does not match the model");
        const fb::verify::Report report =
            model ? std::visit([&](const auto& m) { return fb::verify::verify_model(s, m, o, d); }, model->model)
                  : fb::verify::run_suite(s, o);
        char* json = copy_string(fb::app::dump_json(fb::verify::to_json(report)));
        if (report_text) {
            try {
                *report_text = copy_string(fb::verify::to_text(report));
            } catch (...) {
                std::free(json);
                throw;
            }
        }
        *report_json = json;
        *passed = report.passed ? 1 : 0;
    });
}

}  // extern "C"
