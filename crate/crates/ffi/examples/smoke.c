/* Scores a sentence and runs the golden pipeline through the C API.
 *
 *   cc -I include examples/smoke.c ../../target/debug/libesg_sentiment_ffi.a -lpthread -ldl -lm
 *   ./a.out fixtures/golden/run.json /tmp/out
 */
#include <stdio.h>

#include "esg_sentiment.h"

static int fail(const char *what, EsgStatus status) {
    const char *msg = esg_last_error_message();
    fprintf(stderr, "%s failed (%d): %s\n", what, (int)status, msg ? msg : "");
    return 1;
}

int main(int argc, char **argv) {
    if (argc != 3) {
        fprintf(stderr, "usage: %s RUN_CONFIG OUT_DIR\n", argv[0]);
        return 2;
    }

    EsgLexicon *lexicon = NULL;
    EsgStatus status = esg_lexicon_default(&lexicon);
    if (status != ESG_STATUS_OK) return fail("esg_lexicon_default", status);

    EsgVerdict verdict;
    status = esg_score_text(lexicon, "strong green growth, no losses", &verdict);
    esg_lexicon_free(lexicon);
    if (status != ESG_STATUS_OK) return fail("esg_score_text", status);

    double value = 0.0;
    status = esg_composite(verdict, &value);
    if (status != ESG_STATUS_OK) return fail("esg_composite", status);
    printf("composite %.6f\n", value);

    EsgRunConfig *config = NULL;
    status = esg_config_load(argv[1], &config);
    if (status != ESG_STATUS_OK) return fail("esg_config_load", status);
    status = esg_config_set_out(config, argv[2]);
    if (status != ESG_STATUS_OK) return fail("esg_config_set_out", status);

    char *summary = NULL;
    status = esg_run(config, &summary);
    esg_config_free(config);
    if (status != ESG_STATUS_OK) return fail("esg_run", status);
    fputs(summary, stdout);
    esg_string_free(summary);
    return 0;
}
