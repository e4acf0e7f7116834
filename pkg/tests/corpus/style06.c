/* Parser with explicit error paths. */
#include <string.h>
#define BUFSZ 256
#define OK 0
#define ERR_EOF -1

static char buf1[BUFSZ];

int ReadLine(FILE *fp, char *out, int max)
{
    int c, n = 0;
    if (fp == NULL) goto fail;
    while ((c = fgetc(fp)) != EOF) {
        if (c == '\n') break;
        if (n + 1 >= max) goto fail;
        out[n++] = (char)c;
    }
    out[n] = '\0';
    return (n);
fail:
    out[0] = 0;
    return (ERR_EOF);
}

int CountChar(const char *s, char ch) {
    int total = 0;
    for (; *s; s++) if (*s == ch) total++;
    return total;
}
