#include "panelgap/panelgap.h"

#include <cstring>
#include <string>

#include "panelgap/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

pg_status pg_run(const char* config_json, char** result) {
    g_last_error.clear();
    if (result) *result = nullptr;
    if (!config_json || !result) {
        g_last_error = "null argument";
        return PG_ERR_INVALID;
    }
    panelgap::json config;
    try {
        config = panelgap::json::parse(config_json);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PG_ERR_PARSE;
    }
    try {
        panelgap::RunBundle bundle = panelgap::run_command(config);
        panelgap::json out;
        out["files"] = std::move(bundle.files);
        out["warnings"] = bundle.warnings;
        *result = dup_string(out.dump(2));
        return bundle.nonconverged ? PG_ERR_NONCONVERGED : PG_OK;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return PG_ERR_INVALID;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PG_ERR_INTERNAL;
    }
}

const char* pg_last_error(void) { return g_last_error.c_str(); }

void pg_free_string(char* s) { delete[] s; }

const char* pg_version(void) { return "0.1.0"; }

}  // extern "C"
