// tabs, trailing spaces and a long line
#define SQR(x) ((x)*(x))
#define CLAMP(v, lo, hi) \
	((v) < (lo) ? (lo) : ((v) > (hi) ? (hi) : (v)))



static double _scale2 = 2.5;   
double area(double r) { return 3.14159 * SQR(r) * _scale2; }  // trailing note

int pick(int k) {	
	if (k < 0)
		return -1;
	else if (k == 0)
		return 0;
	else if (k > 100) return CLAMP(k, 0, 100);   /* clamp large values before they overflow */
	else
		return k;
}
